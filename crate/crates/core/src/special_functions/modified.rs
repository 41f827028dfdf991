//! Ratios of Bessel functions on the imaginary axis.
//!
//! On λ = ±iμ we have J_ν(±iμ) = e^{±iπν/2} I_ν(μ) and
//! J'_ν(±iμ)/J_ν(±iμ) = ∓i I'_ν(μ)/I_ν(μ), so everything reduces to
//! ratios of modified functions, which never overflow.

use num_complex::Complex64;

use super::{bessel_j_complex, hankel_symbol, rgamma};
use crate::dd::DD;
use crate::error::{Error, Result};

/// Beyond this μ the two modified functions I_{±ν} agree to e^{−2μ}.
const RATIO_ASYMPTOTIC: f64 = 60.0;

/// I_{ν+1}(μ)/I_ν(μ) by modified Lentz on the continued fraction
/// 1/(b₁ + 1/(b₂ + …)), b_k = 2(ν+k)/μ. Requires ν > −1.
fn cf1_dd(nu: f64, mu: f64) -> DD {
    let tiny = DD::new(1e-300);
    let inv = DD::ONE / DD::new(mu);
    let b = |k: usize| (DD::new(nu) + k as f64) * inv * 2.0;
    // f = 0 + 1/(b1 + 1/(b2 + ...))
    let mut f = tiny;
    let mut c = f;
    let mut d = DD::ZERO;
    for k in 1..100_000 {
        let bk = b(k);
        d = bk + d;
        if d.abs().hi < 1e-300 {
            d = tiny;
        }
        c = bk + DD::ONE / c;
        if c.abs().hi < 1e-300 {
            c = tiny;
        }
        d = DD::ONE / d;
        let delta = c * d;
        f = f * delta;
        if (delta - DD::ONE).abs().hi < 1e-32 {
            break;
        }
    }
    f
}

/// I'_ν(μ)/I_ν(μ) in double-double, μ > 0.
pub(crate) fn modified_log_derivative_dd(nu: f64, mu: f64) -> DD {
    if nu > -1.0 {
        let inv = DD::ONE / DD::new(mu);
        DD::new(nu) * inv + cf1_dd(nu, mu)
    } else {
        // y_ν = 1/(y_{ν+1} + (ν+1)/μ) + ν/μ
        let inv = DD::ONE / DD::new(mu);
        let up = modified_log_derivative_dd(nu + 1.0, mu);
        DD::ONE / (up + DD::new(nu + 1.0) * inv) + DD::new(nu) * inv
    }
}

/// I'_ν(μ)/I_ν(μ), μ > 0.
pub fn modified_log_derivative(nu: f64, mu: f64) -> f64 {
    modified_log_derivative_dd(nu, mu).to_f64()
}

/// Σ (μ/2)^{2k}/(k! Γ(k+ν+1)), so that I_ν(μ) = (μ/2)^ν Σ.
fn modified_series_dd(nu: f64, mu: f64) -> DD {
    let h = DD::new(0.5 * mu);
    let h2 = h * h;
    let mut term = DD::new(rgamma(nu + 1.0));
    if term.hi == 0.0 {
        // 1/Γ(ν+1) vanishes: start from k=1
        term = h2 * rgamma(nu + 2.0);
        let mut sum = term;
        let mut k = 2usize;
        loop {
            let kf = k as f64;
            term = term * h2 / ((DD::new(nu) + kf) * kf);
            sum += term;
            if term.hi < 1e-34 * sum.hi.abs() && kf > 0.5 * mu {
                return sum;
            }
            k += 1;
        }
    }
    let mut sum = term;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        term = term * h2 / ((DD::new(nu) + kf) * kf);
        sum += term;
        if (term.abs().hi < 1e-34 * sum.abs().hi && kf > 0.5 * mu) || k > 2000 {
            return sum;
        }
        k += 1;
    }
}

/// Σ (−1)^k ⟨ν,k⟩/(2μ)^k with optimal truncation, so that
/// I_ν(μ) ≈ e^μ/√(2πμ) Σ.
fn modified_hankel(nu: f64, mu: f64) -> f64 {
    let w = -0.5 / mu;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..200 {
        let t = hankel_symbol(nu, k) * w.powi(k as i32);
        if t.abs() > prev {
            break;
        }
        sum += t;
        if t.abs() < 1e-17 * sum.abs() {
            break;
        }
        prev = t.abs();
    }
    sum
}

/// I_{ν₁}(μ)/I_{ν₂}(μ) in double-double.
pub(crate) fn modified_ratio_dd(nu1: f64, nu2: f64, mu: f64) -> DD {
    if nu1 == nu2 {
        return DD::ONE;
    }
    if mu > RATIO_ASYMPTOTIC {
        return DD::new(modified_hankel(nu1, mu)) / DD::new(modified_hankel(nu2, mu));
    }
    let s1 = modified_series_dd(nu1, mu);
    let s2 = modified_series_dd(nu2, mu);
    s1 / s2 * (0.5 * mu).powf(nu1 - nu2)
}

/// I_{ν₁}(μ)/I_{ν₂}(μ), μ > 0.
pub fn modified_ratio(nu1: f64, nu2: f64, mu: f64) -> f64 {
    modified_ratio_dd(nu1, nu2, mu).to_f64()
}

/// e^{−μ} I_ν(μ), μ > 0.
pub fn modified_scaled(nu: f64, mu: f64) -> f64 {
    if mu > RATIO_ASYMPTOTIC {
        modified_hankel(nu, mu) / (2.0 * std::f64::consts::PI * mu).sqrt()
    } else {
        modified_series_dd(nu, mu).to_f64() * (0.5 * mu).powf(nu) * (-mu).exp()
    }
}

/// Classification of a point with respect to the imaginary axis.
enum Ray {
    /// Exactly on ±iμ: (μ, σ).
    On(f64, f64),
    /// Within the 10° cone around the axis.
    Near,
}

fn classify(lambda: Complex64) -> Result<Ray> {
    let mu = lambda.norm();
    if !(mu >= 1.0) {
        return Err(Error::Domain(format!(
            "|λ| = {mu} < 1: use the direct quotient"
        )));
    }
    let off = (lambda.re / mu).abs().asin();
    if off > 10f64.to_radians() {
        return Err(Error::Domain(format!(
            "λ = {lambda} is not within 10° of the imaginary axis"
        )));
    }
    if lambda.re == 0.0 {
        Ok(Ray::On(lambda.im.abs(), lambda.im.signum()))
    } else {
        Ok(Ray::Near)
    }
}

/// J'_ν(λ)/J_ν(λ) on or near the rays e^{±iπ/2}μ, μ ≥ 1.
pub fn log_derivative_ratio(nu: f64, lambda: Complex64) -> Result<Complex64> {
    match classify(lambda)? {
        Ray::On(mu, sigma) => {
            let y = modified_log_derivative(nu, mu);
            Ok(Complex64::new(0.0, -sigma * y))
        }
        Ray::Near => {
            let p = bessel_j_complex(nu, lambda);
            Ok(p.jp / p.j)
        }
    }
}

/// J_{ν₁}(λ)/J_{ν₂}(λ) on or near the rays e^{±iπ/2}μ, μ ≥ 1.
pub fn bessel_ratio(nu1: f64, nu2: f64, lambda: Complex64) -> Result<Complex64> {
    if nu1 == nu2 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    match classify(lambda)? {
        Ray::On(mu, sigma) => {
            let phase = Complex64::from_polar(1.0, sigma * std::f64::consts::FRAC_PI_2 * (nu1 - nu2));
            Ok(phase * modified_ratio(nu1, nu2, mu))
        }
        Ray::Near => {
            let a = bessel_j_complex(nu1, lambda);
            let b = bessel_j_complex(nu2, lambda);
            Ok(a.j / b.j)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> Complex64 {
        Complex64::i()
    }

    #[test]
    fn half_order_log_derivative() {
        let mu: f64 = 5.0;
        let z = i() * mu;
        let exact = z.cos() / z.sin() - 0.5 / z;
        let got = log_derivative_ratio(0.5, z).unwrap();
        assert!((got - exact).norm() < 1e-12);
    }

    #[test]
    fn lower_ray_is_conjugate() {
        let a = log_derivative_ratio(0.2, i() * 7.0).unwrap();
        let b = log_derivative_ratio(0.2, -i() * 7.0).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn leading_behaviour_far_out() {
        // J'/J → −i(1 + …) on the upper ray
        let got = log_derivative_ratio(0.3, i() * 1e3).unwrap();
        assert!((got - Complex64::new(0.0, -1.0)).norm() < 1e-3);
        let lam = i() * 1e3;
        let corr = got + i() * (1.0 - i() / (2.0 * lam));
        assert!(corr.norm() < 1e-5);
    }

    #[test]
    fn agrees_with_direct_quotient() {
        for nu in [-0.8, -0.2, 0.3, 0.7] {
            let z = i() * 3.0;
            let p = bessel_j_complex(nu, z);
            let d = p.jp / p.j;
            let got = log_derivative_ratio(nu, z).unwrap();
            assert!((got - d).norm() < 1e-11 * d.norm(), "nu={nu}");
        }
    }

    #[test]
    fn ratio_tan() {
        let mu: f64 = 4.0;
        let got = bessel_ratio(0.5, -0.5, i() * mu).unwrap();
        assert!((got - i() * mu.tanh()).norm() < 1e-12);
    }

    #[test]
    fn ratio_identity() {
        assert_eq!(bessel_ratio(0.3, 0.3, i() * 2.0).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn ratio_phase_limit() {
        let g = -0.3;
        let got = bessel_ratio(0.5 - g, g - 0.5, i() * 1e3).unwrap();
        let lim = Complex64::from_polar(1.0, std::f64::consts::PI * (0.5 - g));
        assert!((got - lim).norm() < 1e-4);
    }

    #[test]
    fn ratio_crosses_asymptotic_switch_smoothly() {
        let a = modified_ratio(0.8, -0.8, RATIO_ASYMPTOTIC);
        let b = modified_ratio(0.8, -0.8, RATIO_ASYMPTOTIC + 1e-9);
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn scaled_half_order() {
        for mu in [2.0f64, 30.0, 100.0] {
            let exact = (2.0 / (std::f64::consts::PI * mu)).sqrt() * 0.5 * (1.0 - (-2.0 * mu).exp());
            assert!((modified_scaled(0.5, mu) - exact).abs() < 1e-14 * exact);
        }
    }

    #[test]
    fn cf_below_minus_one() {
        // I_{-1.2} log-derivative from the downward step agrees with the series
        let (nu, mu) = (-1.2, 3.0);
        let h = 1e-5;
        let f = |m: f64| modified_scaled(nu, m).ln() + m;
        let fd = (f(mu + h) - f(mu - h)) / (2.0 * h);
        assert!((modified_log_derivative(nu, mu) - fd).abs() < 1e-8);
    }

    #[test]
    fn off_axis_rejected() {
        assert!(log_derivative_ratio(0.2, Complex64::new(3.0, 3.0)).is_err());
        assert!(log_derivative_ratio(0.2, Complex64::new(0.0, 0.5)).is_err());
    }
}
