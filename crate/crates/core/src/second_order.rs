//! The second-order operator Δ = −∂² + g(g−1)/x² on (0,1) with φ(1) = 0 and
//! φ ~ C₁x^g + C₂x^{1−g} at 0.
//!
//! With λ = μ², eigenvalues solve 𝓕(μ) = F(μ)/μ = ϱ(α,β), i.e. the roots of
//! μ^{2g} J_{1/2−g}(μ) − ϱ μ J_{g−1/2}(μ). For the limiting extensions the
//! resolvent of Δ at μ² is G₁₁(μ)/μ of the first-order kernel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator_model::{secular_f, secular_roots, Coupling, Extension, Secular};
use crate::resolvent::{kernel, Which};
use crate::special_functions::{bessel_j_and_prime, bessel_zeros, gamma};

/// 2^{2g−1} Γ(1/2+g)/Γ(3/2−g): the limit of 𝓕(μ) as μ → 0.
fn varrho_unit(g: f64) -> f64 {
    (2f64).powf(2.0 * g - 1.0) * gamma(0.5 + g) / gamma(1.5 - g)
}

/// ϱ(α,β) = (β/α) 2^{2g−1} Γ(1/2+g)/Γ(3/2−g).
pub fn varrho(ext: &Extension, g: Coupling) -> Result<f64> {
    if ext.is_dirichlet() {
        return Err(Error::Domain("α = 0 is the D-extension: ϱ is infinite".into()));
    }
    Ok(ext.beta() / ext.alpha() * varrho_unit(g.value()))
}

/// 𝓕(μ) = F(μ)/μ.
pub fn script_f(mu: f64, g: Coupling) -> Result<f64> {
    Ok(secular_f(mu, g)? / mu)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderSpectrum {
    pub g: f64,
    pub alpha: f64,
    pub beta: f64,
    /// ϱ(α,β); absent for the D-extension.
    pub varrho: Option<f64>,
    /// Roots μ_n > 0.
    pub mu: Vec<f64>,
    /// Eigenvalues μ_n² of Δ.
    pub eigenvalues: Vec<f64>,
    pub first_interval_root: bool,
}

/// The first `n_max` positive roots μ_n of 𝓕(μ) = ϱ and the eigenvalues μ_n².
pub fn second_order_eigenvalues(ext: &Extension, g: Coupling, n_max: usize) -> Result<SecondOrderSpectrum> {
    if n_max == 0 {
        return Err(Error::Config("n_max must be at least 1".into()));
    }
    let gv = g.value();
    let (mu, first, vr) = if ext.is_dirichlet() {
        (bessel_zeros(g.nu2(), n_max)?, false, None)
    } else if ext.is_neumann() {
        (bessel_zeros(g.nu1(), n_max)?, false, Some(0.0))
    } else {
        let vr = varrho(ext, g)?;
        let sec = Secular { g: gv, rho: vr, linear: true };
        // H(μ) ≈ μ^{1/2+g} (K − ϱ)/(2^{g−1/2} Γ(g+1/2)) near 0, K = 𝓕(0⁺)
        let k = varrho_unit(gv);
        let h0 = if (k - vr).abs() > 1e-10 * k { (k - vr).signum() } else { sec.eval(1e-3).0.signum() };
        let (mu, _, first) = secular_roots(&sec, h0, n_max)?;
        (mu, first, Some(vr))
    };
    Ok(SecondOrderSpectrum {
        g: gv,
        alpha: ext.alpha(),
        beta: ext.beta(),
        varrho: vr,
        eigenvalues: mu.iter().map(|m| m * m).collect(),
        mu,
        first_interval_root: first,
    })
}

/// τ(μ) = 1/(1 − ϱ/𝓕(μ)), evaluated as μ^{2g}J_{1/2−g}/(μ^{2g}J_{1/2−g} − ϱμJ_{g−1/2}).
pub fn second_order_tau(mu: f64, ext: &Extension, g: Coupling) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("μ = {mu} must be positive")));
    }
    if ext.is_dirichlet() {
        return Ok(0.0);
    }
    if ext.is_neumann() {
        return Ok(1.0);
    }
    let gv = g.value();
    let vr = varrho(ext, g)?;
    let num = mu.powf(2.0 * gv) * bessel_j_and_prime(g.nu1(), mu).0;
    let den = Secular { g: gv, rho: vr, linear: true }.eval(mu).0;
    if den.abs() <= 8.0 * f64::EPSILON * (num.abs() + (vr * mu * bessel_j_and_prime(g.nu2(), mu).0).abs()) {
        return Err(Error::Pole(format!("μ = {mu} is a root of 𝓕(μ) = ϱ")));
    }
    Ok(num / den)
}

/// √x J_ν(μx) and its x-derivative.
fn radial(nu: f64, mu: f64, x: f64) -> (f64, f64) {
    let (j, jp) = bessel_j_and_prime(nu, mu * x);
    let r = x.sqrt();
    (r * j, 0.5 * j / r + r * mu * jp)
}

/// Resolvent kernel of Δ_{D,N} − μ² from its own solutions:
/// −u_L(x<) u_R(x>)/W with u_L = √x J_{g−1/2}(μx) (D) or √x J_{1/2−g}(μx)
/// (N), u_R(x) = √x [J_{g−1/2}(μ) J_{1/2−g}(μx) − J_{1/2−g}(μ) J_{g−1/2}(μx)]
/// and W = u_L u_R' − u_L' u_R.
pub fn direct_kernel(which: Which, x: f64, y: f64, mu: f64, g: f64) -> Result<f64> {
    Coupling::new(g)?;
    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0 && mu > 0.0) {
        return Err(Error::Domain("need 0 < x, y < 1 and μ > 0".into()));
    }
    let (a, b) = (g - 0.5, 0.5 - g);
    let nu_l = match which {
        Which::D => a,
        Which::N => b,
    };
    let ja = bessel_j_and_prime(a, mu).0;
    let jb = bessel_j_and_prime(b, mu).0;
    let u_r = |t: f64| {
        let (pb, pbd) = radial(b, mu, t);
        let (pa, pad) = radial(a, mu, t);
        (ja * pb - jb * pa, ja * pbd - jb * pad)
    };
    let x0 = 0.5;
    let (l0, l0d) = radial(nu_l, mu, x0);
    let (r0, r0d) = u_r(x0);
    let w = l0 * r0d - l0d * r0;
    if w.abs() < 1e-300 {
        return Err(Error::Pole(format!("μ = {mu} is an eigenvalue")));
    }
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    Ok(-radial(nu_l, mu, lo).0 * u_r(hi).0 / w)
}

/// |𝓖(x,y;μ²) − G₁₁(x,y;μ)/μ| for the limiting extension `which`.
pub fn resolvent_relation_check(which: Which, x: f64, y: f64, mu: f64, g: f64) -> Result<f64> {
    let direct = direct_kernel(which, x, y, mu, g)?;
    let g11 = kernel(which, x, y, Complex64::new(mu, 0.0), g)?[0][0];
    Ok((Complex64::new(direct, 0.0) - g11 / mu).norm())
}

/// Predicted anomalous pole locations −(1/2−g)k, k = 1..K.
pub fn predicted_pole_locations(g: f64, k_max: usize) -> Vec<f64> {
    (1..=k_max).map(|k| -(0.5 - g) * k as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_model::positive_eigenvalues;

    fn cg(g: f64) -> Coupling {
        Coupling::new(g).unwrap()
    }

    #[test]
    fn varrho_limits() {
        assert_eq!(varrho(&Extension::neumann(), cg(0.3)).unwrap(), 0.0);
        assert!(varrho(&Extension::dirichlet(), cg(0.3)).is_err());
        let e = Extension::new(1.0, 2.0).unwrap();
        assert!((varrho(&e, cg(0.0)).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn script_f_limit_at_zero() {
        for g in [-0.3, 0.1, 1.0 / 3.0] {
            let v = script_f(1e-4, cg(g)).unwrap();
            assert!((v - varrho_unit(g)).abs() < 1e-7 * varrho_unit(g), "{g}: {v}");
        }
    }

    #[test]
    fn limiting_spectra_are_first_order_zeros() {
        let g = cg(0.3);
        for e in [Extension::dirichlet(), Extension::neumann()] {
            let s = second_order_eigenvalues(&e, g, 20).unwrap();
            let p = positive_eigenvalues(&e, g, 20).unwrap().positive;
            for (m, l) in s.mu.iter().zip(&p) {
                assert!((m - l).abs() < 1e-13 * l);
            }
            assert!((s.eigenvalues[3] - p[3] * p[3]).abs() < 1e-12 * p[3] * p[3]);
        }
    }

    #[test]
    fn roots_satisfy_condition() {
        let g = cg(1.0 / 3.0);
        let e = Extension::new(1.0, 3.0 / varrho_unit(1.0 / 3.0)).unwrap();
        let vr = varrho(&e, g).unwrap();
        assert!((vr - 3.0).abs() < 1e-13);
        let s = second_order_eigenvalues(&e, g, 10).unwrap();
        assert!(s.first_interval_root);
        for m in &s.mu {
            assert!((script_f(*m, g).unwrap() - vr).abs() < 1e-9 * vr);
        }
        assert!(s.mu.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn first_interval_rule() {
        // a root below j_{g−1/2,1} exactly when ϱ > 𝓕(0⁺)
        let g = cg(-0.2);
        let k = varrho_unit(-0.2);
        for (ratio, want) in [(0.5, false), (2.0, true), (-1.0, false)] {
            let e = Extension::new(1.0, ratio).unwrap();
            let s = second_order_eigenvalues(&e, g, 3).unwrap();
            assert_eq!(s.first_interval_root, want, "{ratio} {k}");
        }
    }

    #[test]
    fn tau_limits_and_pole() {
        let g = cg(1.0 / 3.0);
        assert_eq!(second_order_tau(2.0, &Extension::dirichlet(), g).unwrap(), 0.0);
        assert_eq!(second_order_tau(2.0, &Extension::neumann(), g).unwrap(), 1.0);
        let e = Extension::new(1.0, 3.0 / varrho_unit(1.0 / 3.0)).unwrap();
        let t = second_order_tau(2.0, &e, g).unwrap();
        let f = script_f(2.0, g).unwrap();
        assert!((t - 1.0 / (1.0 - 3.0 / f)).abs() < 1e-12 * t.abs());
    }

    #[test]
    fn relation_at_sample_point() {
        for w in [Which::D, Which::N] {
            let r = resolvent_relation_check(w, 0.3, 0.6, 2.0, -0.25).unwrap();
            assert!(r < 1e-12, "{w:?}: {r}");
        }
    }

    #[test]
    fn zero_coupling_sine_kernel() {
        // g = 0, D: u_L ∝ cos(μx), u_R ∝ sin(μ(1−x)), W ∝ −μ cos μ
        let (x, y, mu) = (0.2, 0.7, 1.3);
        let direct = direct_kernel(Which::D, x, y, mu, 0.0).unwrap();
        let closed = (mu * x).cos() * (mu * (1.0 - y)).sin() / (mu * mu.cos());
        assert!((direct - closed).abs() < 1e-13, "{direct} {closed}");
    }

    #[test]
    fn pole_locations() {
        let p = predicted_pole_locations(1.0 / 3.0, 3);
        assert!((p[0] + 1.0 / 6.0).abs() < 1e-15 && (p[2] + 0.5).abs() < 1e-15);
        assert!(predicted_pole_locations(0.2, 0).is_empty());
    }
}
