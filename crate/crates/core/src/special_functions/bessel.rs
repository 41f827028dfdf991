//! J_ν and J'_ν for real and complex argument.

use num_complex::Complex;
use num_complex::Complex64;

use super::hankel::{hankel_auto, hankel_real_fast};
use super::{rgamma, SERIES_LIMIT};
use crate::dd::DD;
use crate::error::{Error, Result};

fn is_negative_integer(nu: f64) -> bool {
    nu < 0.0 && nu == nu.round()
}

/// Power series in double-double. Returns (Σ, Σ') where
/// J_ν(z) = (z/2)^ν Σ and z J'_ν(z) = (z/2)^ν Σ'.
fn series_sums_real(nu: f64, z: f64) -> (DD, DD) {
    let h = z * 0.5;
    let h2 = DD::new(h) * DD::new(h);
    let nu_dd = DD::new(nu);
    let mut term = DD::new(rgamma(nu + 1.0));
    let mut sum = term;
    let mut dsum = term * nu;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let denom = (nu_dd + kf) * kf;
        term = -(term * h2) / denom;
        sum += term;
        dsum += term * (nu_dd + 2.0 * kf);
        if kf > h && term.abs().hi < 1e-34 * sum.abs().hi.max(1e-300) {
            break;
        }
        if k > 400 {
            break;
        }
        k += 1;
    }
    (sum, dsum)
}

/// J_ν(z) and J'_ν(z) from the power series, z > 0.
pub(crate) fn series_real(nu: f64, z: f64) -> (f64, f64) {
    if is_negative_integer(nu) {
        let s = if (nu as i64) % 2 == 0 { 1.0 } else { -1.0 };
        let (j, jp) = series_real(-nu, z);
        return (s * j, s * jp);
    }
    let (sum, dsum) = series_sums_real(nu, z);
    let pref = (0.5 * z).powf(nu);
    (pref * sum.to_f64(), pref * dsum.to_f64() / z)
}

/// J_ν(z) from the power series alone, z > 0.
pub fn bessel_j_series(nu: f64, z: f64) -> f64 {
    series_real(nu, z).0
}

/// J_ν(z) from the Hankel expansion alone, with its remainder estimate
/// (relative to the envelope √(2/πz)).
pub fn bessel_j_hankel(nu: f64, z: f64) -> (f64, f64) {
    let (j, _, rem) = hankel_real(nu, z);
    (j, rem)
}

fn hankel_real(nu: f64, z: f64) -> (f64, f64, f64) {
    let (p, q, r, s, rem) = hankel_real_fast(nu, z);
    let c = (0.5 * nu + 0.25) * std::f64::consts::PI;
    let (sz, cz) = z.sin_cos();
    let (sc, cc) = c.sin_cos();
    // χ = z − c without forming the difference
    let cos_chi = cz * cc + sz * sc;
    let sin_chi = sz * cc - cz * sc;
    let env = (2.0 / (std::f64::consts::PI * z)).sqrt();
    let j = env * (p * cos_chi - q * sin_chi);
    let jp = -env * (r * sin_chi + s * cos_chi);
    (j, jp, rem)
}

/// J_ν(z) and J'_ν(z) for real z > 0 and any real order with |ν| < 3.
pub fn bessel_j_and_prime(nu: f64, z: f64) -> (f64, f64) {
    if z <= SERIES_LIMIT {
        series_real(nu, z)
    } else {
        let (j, jp, _) = hankel_real(nu, z);
        (j, jp)
    }
}

fn check(nu: f64, z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("argument z = {z} must be positive")));
    }
    if !(nu.abs() < 1.5) {
        return Err(Error::Domain(format!("order {nu} outside (-3/2, 3/2)")));
    }
    Ok(())
}

/// J_ν(z), z > 0, |ν| < 3/2.
pub fn bessel_j(nu: f64, z: f64) -> Result<f64> {
    check(nu, z)?;
    if z <= SERIES_LIMIT {
        Ok(series_real(nu, z).0)
    } else {
        let (j, _, rem) = hankel_real(nu, z);
        if rem > 1e-12 {
            return Err(Error::AccuracyLoss { achieved: rem });
        }
        Ok(j)
    }
}

/// J'_ν(z) = (ν/z) J_ν(z) − J_{ν+1}(z).
pub fn bessel_j_prime(nu: f64, z: f64) -> Result<f64> {
    check(nu, z)?;
    let j = bessel_j_and_prime(nu, z).0;
    let j1 = bessel_j_and_prime(nu + 1.0, z).0;
    Ok(nu / z * j - j1)
}

/// A complex value pair carrying a common factor e^{|Im z|} that has been
/// divided out.
#[derive(Clone, Copy, Debug)]
pub struct ScaledPair {
    pub j: Complex64,
    pub jp: Complex64,
    /// The true values are `j * exp(scale)` and `jp * exp(scale)`.
    pub scale: f64,
}

type CDD = Complex<DD>;

fn cdd(z: Complex64) -> CDD {
    Complex::new(DD::new(z.re), DD::new(z.im))
}

fn series_complex(nu: f64, z: Complex64) -> (Complex64, Complex64) {
    if is_negative_integer(nu) {
        let s = if (nu as i64) % 2 == 0 { 1.0 } else { -1.0 };
        let (j, jp) = series_complex(-nu, z);
        return (s * j, s * jp);
    }
    let h = cdd(z * 0.5);
    let h2 = h * h;
    let nu_dd = DD::new(nu);
    let mut term: CDD = Complex::new(DD::new(rgamma(nu + 1.0)), DD::ZERO);
    let mut sum = term;
    let mut dsum = term * Complex::new(nu_dd, DD::ZERO);
    let hn = 0.5 * z.norm();
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let denom = (nu_dd + kf) * kf;
        term = -(term * h2);
        term = Complex::new(term.re / denom, term.im / denom);
        sum = sum + term;
        let f = nu_dd + 2.0 * kf;
        dsum = dsum + Complex::new(term.re * f, term.im * f);
        let tn = term.re.to_f64().hypot(term.im.to_f64());
        let sn = sum.re.to_f64().hypot(sum.im.to_f64());
        if kf > hn && tn < 1e-34 * sn.max(1e-300) {
            break;
        }
        if k > 400 {
            break;
        }
        k += 1;
    }
    let pref = (z * 0.5).powf(nu);
    let s = Complex64::new(sum.re.to_f64(), sum.im.to_f64());
    let ds = Complex64::new(dsum.re.to_f64(), dsum.im.to_f64());
    (pref * s, pref * ds / z)
}

/// J_ν(z) and J'_ν(z) for complex z off the negative real axis, scaled by
/// e^{−|Im z|}.
pub fn bessel_j_complex(nu: f64, z: Complex64) -> ScaledPair {
    let scale = z.im.abs();
    if z.norm() <= SERIES_LIMIT {
        let (j, jp) = series_complex(nu, z);
        let f = (-scale).exp();
        return ScaledPair {
            j: j * f,
            jp: jp * f,
            scale,
        };
    }
    let h = hankel_auto(nu, z, true);
    // beyond |z| = 20 the smallest term is below e^{−2|z|}
    debug_assert!(h.remainder < 1e-13, "Hankel remainder {} at {z}", h.remainder);
    let c = (0.5 * nu + 0.25) * std::f64::consts::PI;
    let chi = z - c;
    let i = Complex64::i();
    // e^{±iχ} e^{−|Im z|}
    let ep = (i * chi - scale).exp();
    let em = (-i * chi - scale).exp();
    let cos_chi = (ep + em) * 0.5;
    let sin_chi = (ep - em) / (2.0 * i);
    let env = (2.0 / (std::f64::consts::PI * z)).sqrt();
    ScaledPair {
        j: env * (h.p * cos_chi - h.q * sin_chi),
        jp: -env * (h.r * sin_chi + h.s * cos_chi),
        scale,
    }
}
