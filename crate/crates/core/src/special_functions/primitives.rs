//! Closed-form antiderivatives of x J_ν(λx)² and x J_ν(λx) J_{−ν}(λx).

use super::bessel::bessel_j_and_prime;
use super::gamma;
use crate::error::{Error, Result};

use std::f64::consts::PI;

fn jv(nu: f64, z: f64) -> f64 {
    bessel_j_and_prime(nu, z).0
}

/// ₁F₂(−1/2; −ν, ν; −X²) written through Bessel products.
pub(crate) fn hyp1f2_bessel(nu: f64, xl: f64) -> f64 {
    let bracket = jv(-1.0 - nu, xl) * jv(-1.0 + nu, xl)
        + 2.0 * jv(-nu, xl) * jv(nu, xl)
        + jv(1.0 - nu, xl) * jv(1.0 + nu, xl);
    -PI * xl * xl / ((PI * nu).sin() * 4.0 * nu) * bracket
}

/// Returns (∫x J_ν(λx)² dx, ∫x J_ν(λx) J_{−ν}(λx) dx) at `x`, both
/// normalised to vanish as x → 0⁺.
pub fn product_primitive(nu: f64, lambda: f64, x: f64) -> Result<(f64, f64)> {
    if nu == nu.round() {
        return Err(Error::Domain(format!("integer order {nu}: sin(πν) vanishes")));
    }
    if !(lambda > 0.0) || !(x > 0.0) {
        return Err(Error::Domain("λ and x must be positive".into()));
    }
    let z = lambda * x;
    let same = 0.5 * x * x * (jv(nu, z).powi(2) - jv(nu - 1.0, z) * jv(nu + 1.0, z));
    let pref = -nu * nu / (lambda * lambda * gamma(1.0 - nu) * gamma(1.0 + nu));
    let cross = pref * (hyp1f2_bessel(nu, z) - 1.0);
    Ok((same, cross))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_elementary() {
        // x J_{1/2}(λx)² = (2/(πλ)) sin²(λx)
        let (l, x) = (3.0f64, 0.7f64);
        let (a, _) = product_primitive(0.5, l, x).unwrap();
        let exact = (2.0 / (PI * l)) * (0.5 * x - (2.0 * l * x).sin() / (4.0 * l));
        assert!((a - exact).abs() < 1e-10);
    }

    #[test]
    fn cross_vanishes_at_origin() {
        let (_, b) = product_primitive(-1.0 / 6.0, 5.0, 1e-9).unwrap();
        assert!(b.abs() < 1e-12);
        assert!((hyp1f2_bessel(0.3, 1e-6) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn derivatives_match_integrands() {
        let (nu, l, h) = (0.3, 4.0, 1e-5);
        for x in [0.2, 0.55, 0.9] {
            let p = product_primitive(nu, l, x + h).unwrap();
            let m = product_primitive(nu, l, x - h).unwrap();
            let d0 = (p.0 - m.0) / (2.0 * h);
            let d1 = (p.1 - m.1) / (2.0 * h);
            assert!((d0 - x * jv(nu, l * x).powi(2)).abs() < 1e-7);
            assert!((d1 - x * jv(nu, l * x) * jv(-nu, l * x)).abs() < 1e-7);
        }
    }

    #[test]
    fn integer_order_rejected() {
        assert!(product_primitive(0.0, 1.0, 0.5).is_err());
    }
}
