//! Positive zeros j_{ν,n} of J_ν.
//!
//! Large n: McMahon estimate, a sign-change bracket of half-width π/4,
//! bisection down to 1e−3, then Newton. Small n (and ν ≤ −1, where an
//! extra small zero appears) are found by scanning z^{−ν} J_ν(z) from 0.

use super::bessel::bessel_j_and_prime;
use super::rgamma;
use crate::error::{Error, Result};

use std::f64::consts::PI;

/// McMahon's large-n approximation to j_{ν,n}.
pub fn mcmahon(nu: f64, n: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let beta = (n as f64 + 0.5 * nu - 0.25) * PI;
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e)
}

fn j(nu: f64, z: f64) -> f64 {
    bessel_j_and_prime(nu, z).0
}

/// Bisection on a certified bracket down to width `w`, then Newton.
fn refine(nu: f64, mut a: f64, mut b: f64, w: f64) -> Result<f64> {
    let mut fa = j(nu, a);
    let fb = j(nu, b);
    if fa * fb > 0.0 {
        return Err(Error::Bracket(format!("no sign change on [{a}, {b}] for order {nu}")));
    }
    while b - a > w {
        let m = 0.5 * (a + b);
        let fm = j(nu, m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let mut z = 0.5 * (a + b);
    for _ in 0..30 {
        let (f, fp) = bessel_j_and_prime(nu, z);
        let step = f / fp;
        // a step longer than the bracket means Newton went astray
        z = if step.abs() <= b - a { z - step } else { 0.5 * (a + b) };
        if step.abs() <= 4.0 * f64::EPSILON * z {
            break;
        }
    }
    Ok(z)
}

/// The first `n` zeros found by scanning z^{−ν} J_ν(z) from the origin.
fn scan(nu: f64, n: usize) -> Result<Vec<f64>> {
    let h = 0.02;
    let f = |z: f64| j(nu, z) * z.powf(-nu);
    let mut out = Vec::with_capacity(n);
    let mut za = 0.0;
    let mut fa = rgamma(nu + 1.0) * 2f64.powf(-nu);
    while out.len() < n {
        let zb = za + h;
        let fb = f(zb);
        if fa == 0.0 && za > 0.0 {
            out.push(za);
        } else if fa * fb < 0.0 {
            out.push(refine(nu, za, zb, 1e-3)?);
        }
        za = zb;
        fa = fb;
        if za > 50.0 + 4.0 * n as f64 {
            return Err(Error::Bracket(format!("scan for order {nu} found only {} zeros", out.len())));
        }
    }
    Ok(out)
}

/// n-th positive zero of J_ν, n ≥ 1.
pub fn bessel_zero(nu: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("zero index starts at 1".into()));
    }
    if !(nu.abs() < 1.5) {
        return Err(Error::Domain(format!("order {nu} outside (-3/2, 3/2)")));
    }
    if n <= 4 || nu <= -1.0 {
        return Ok(scan(nu, n)?[n - 1]);
    }
    let c = mcmahon(nu, n);
    refine(nu, c - PI / 4.0, c + PI / 4.0, 1e-3)
}

/// The first `n` positive zeros of J_ν.
pub fn bessel_zeros(nu: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if !(nu.abs() < 1.5) {
        return Err(Error::Domain(format!("order {nu} outside (-3/2, 3/2)")));
    }
    if nu <= -1.0 {
        return scan(nu, n);
    }
    let mut out = scan(nu, n.min(4))?;
    for k in 5..=n {
        let c = mcmahon(nu, k);
        out.push(refine(nu, c - PI / 4.0, c + PI / 4.0, 1e-3)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_zeros() {
        let z = bessel_zeros(0.5, 100).unwrap();
        for (i, v) in z.iter().enumerate() {
            assert!((v - (i + 1) as f64 * PI).abs() < 1e-12, "n={}", i + 1);
        }
    }

    #[test]
    fn minus_half_order_zeros() {
        for n in [1, 2, 5, 37, 100] {
            let v = bessel_zero(-0.5, n).unwrap();
            assert!((v - (n as f64 - 0.5) * PI).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn residual_criterion() {
        for &(nu, n) in &[(-1.0 / 6.0, 1), (0.3, 7), (-0.2, 250)] {
            let z = bessel_zero(nu, n).unwrap();
            let (f, fp) = bessel_j_and_prime(nu, z);
            assert!(f.abs() <= 1e-13 * fp.abs() * z, "{nu} {n}");
        }
    }

    #[test]
    fn mcmahon_is_close() {
        let z = bessel_zero(0.2, 50).unwrap();
        assert!((mcmahon(0.2, 50) - z).abs() < 1e-6);
    }

    #[test]
    fn near_minus_one() {
        let z = bessel_zero(-0.99, 1).unwrap();
        assert!(z > 0.0 && z < 0.5);
        assert!(bessel_j_and_prime(-0.99, z).0.abs() < 1e-13);
    }

    #[test]
    fn batch_matches_single() {
        let v = bessel_zeros(-0.3, 12).unwrap();
        for (i, z) in v.iter().enumerate() {
            assert_eq!(*z, bessel_zero(-0.3, i + 1).unwrap());
        }
    }
}
