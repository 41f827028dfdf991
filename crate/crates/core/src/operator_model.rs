//! The operator D_x with coupling g, its self-adjoint extensions (α,β) and
//! their spectra.
//!
//! Positive eigenvalues of the extension (α,β) with α ≠ 0 are the roots of
//! H(λ) = λ^{2g} J_{1/2−g}(λ) − ρ J_{g−1/2}(λ). Between consecutive zeros of
//! J_{g−1/2} there is exactly one. In the first interval (0, j₁) a root
//! appears precisely when ρ > 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_functions::{bessel_j_and_prime, bessel_zeros, gamma};

/// Largest |g| accepted.
pub const G_MAX: f64 = 0.49;

/// The coupling g ∈ (−1/2, 1/2), restricted to |g| ≤ 0.49.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling(f64);

impl Coupling {
    pub fn new(g: f64) -> Result<Coupling> {
        if g.is_finite() && g.abs() <= G_MAX {
            Ok(Coupling(g))
        } else {
            Err(Error::Domain(format!("coupling g = {g} outside [-{G_MAX}, {G_MAX}]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// 1/2 − g.
    pub fn nu1(self) -> f64 {
        0.5 - self.0
    }

    /// g − 1/2.
    pub fn nu2(self) -> f64 {
        self.0 - 0.5
    }
}

/// Boundary condition α C₁ + β C₂ = 0, stored on the unit circle with the
/// representative α > 0, or α = 0 and β > 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extension {
    alpha: f64,
    beta: f64,
}

impl Extension {
    pub fn new(alpha: f64, beta: f64) -> Result<Extension> {
        let r = alpha.hypot(beta);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("invalid extension ({alpha}, {beta})")));
        }
        let (mut a, mut b) = (alpha / r, beta / r);
        if a < 0.0 || (a == 0.0 && b < 0.0) {
            a = -a;
            b = -b;
        }
        // keep -0.0 out of the representation
        Ok(Extension { alpha: a + 0.0, beta: b + 0.0 })
    }

    /// α = 0.
    pub fn dirichlet() -> Extension {
        Extension { alpha: 0.0, beta: 1.0 }
    }

    /// β = 0.
    pub fn neumann() -> Extension {
        Extension { alpha: 1.0, beta: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_dirichlet(&self) -> bool {
        self.alpha == 0.0
    }

    pub fn is_neumann(&self) -> bool {
        self.beta == 0.0
    }

    /// (α, −β).
    pub fn flipped(&self) -> Extension {
        Extension::new(self.alpha, -self.beta).expect("unit vector")
    }
}

/// ρ(α,β) = −4^g Γ(1/2+g)/Γ(1/2−g) · β/α.
pub fn rho(ext: &Extension, g: Coupling) -> Result<f64> {
    if ext.is_dirichlet() {
        return Err(Error::Domain("α = 0 is the D-extension: ρ is infinite".into()));
    }
    let g = g.value();
    Ok(rho_from_ratio(g, ext.beta / ext.alpha))
}

pub(crate) fn rho_from_ratio(g: f64, beta_over_alpha: f64) -> f64 {
    -(4f64).powf(g) * gamma(0.5 + g) / gamma(0.5 - g) * beta_over_alpha
}

fn j(nu: f64, z: f64) -> f64 {
    bessel_j_and_prime(nu, z).0
}

/// F(λ) = λ^{2g} J_{1/2−g}(λ)/J_{g−1/2}(λ).
pub fn secular_f(lambda: f64, g: Coupling) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("λ = {lambda} must be positive")));
    }
    let (jd, jdp) = bessel_j_and_prime(g.nu2(), lambda);
    let num = lambda.powf(2.0 * g.value()) * j(g.nu1(), lambda);
    // within a few ulps of a zero of the denominator
    if jd.abs() <= 8.0 * f64::EPSILON * jdp.abs() * lambda {
        let zeros = bessel_zeros(g.nu2(), (lambda / 3.0) as usize + 3)?;
        let n = zeros
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - lambda).abs().total_cmp(&(b.1 - lambda).abs()))
            .map(|(i, _)| i + 1)
            .unwrap_or(0);
        return Err(Error::Pole(format!("λ = {lambda} is zero {n} of J_(g-1/2)")));
    }
    Ok(num / jd)
}

/// H(λ) = λ^{2g} J_{1/2−g}(λ) − ρ λ^p J_{g−1/2}(λ) with p ∈ {0, 1}; p = 1
/// gives the eigenvalue condition of the second-order operator.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Secular {
    pub g: f64,
    pub rho: f64,
    pub linear: bool,
}

impl Secular {
    pub(crate) fn first_order(g: f64, rho: f64) -> Secular {
        Secular { g, rho, linear: false }
    }

    /// H(λ) and H'(λ).
    pub(crate) fn eval(&self, lambda: f64) -> (f64, f64) {
        let g = self.g;
        let (j1, j1p) = bessel_j_and_prime(0.5 - g, lambda);
        let (j2, j2p) = bessel_j_and_prime(g - 0.5, lambda);
        let p = (2.0 * g * lambda.ln()).exp();
        let (q, qp) = if self.linear { (lambda * j2, j2 + lambda * j2p) } else { (j2, j2p) };
        let h = p * j1 - self.rho * q;
        let hp = p * (2.0 * g / lambda * j1 + j1p) - self.rho * qp;
        (h, hp)
    }

    /// Scale against which |H| is judged.
    fn scale(&self, lambda: f64) -> f64 {
        let env = (2.0 / (std::f64::consts::PI * lambda)).sqrt().max(1.0 / lambda.sqrt());
        let r = if self.linear { self.rho.abs() * lambda } else { self.rho.abs() };
        ((2.0 * self.g * lambda.ln()).exp() + r) * env
    }
}

fn h_and_prime(g: f64, rho: f64, lambda: f64) -> (f64, f64) {
    Secular::first_order(g, rho).eval(lambda)
}

/// Number of sign changes of H over `m` equal subintervals of [a, b].
fn sign_changes(h: &Secular, a: f64, b: f64, m: usize, ha: f64, hb: f64) -> usize {
    let mut prev = ha;
    let mut count = 0;
    for i in 1..=m {
        let x = if i == m { b } else { a + (b - a) * i as f64 / m as f64 };
        let v = if i == m { hb } else { h.eval(x).0 };
        if v != 0.0 && prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    count
}

/// The unique root of H in (a, b), certified by sign counts.
fn root_in(g: f64, rho: f64, a: f64, b: f64, ha: f64, hb: f64) -> Result<f64> {
    root_of(&Secular::first_order(g, rho), a, b, ha, hb)
}

/// The unique root of a secular function in (a, b), certified by sign counts.
pub(crate) fn root_of(sec: &Secular, a: f64, b: f64, ha: f64, hb: f64) -> Result<f64> {
    let mut count = sign_changes(sec, a, b, 4, ha, hb);
    if count != 1 {
        let m = (((b - a) / 1e-4).ceil() as usize).max(8);
        count = sign_changes(sec, a, b, m, ha, hb);
        if count != 1 {
            return Err(Error::Structural(format!(
                "{count} sign changes of H on ({a}, {b})"
            )));
        }
    }
    let (mut lo, mut hi) = (a, b);
    let mut flo = ha;
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (h, hp) = sec.eval(x);
        if h == 0.0 {
            return Ok(x);
        }
        if (h > 0.0) == (flo > 0.0) {
            lo = x;
            flo = h;
        } else {
            hi = x;
        }
        let step = h / hp;
        let next = x - step;
        if step.abs() <= 4.0 * f64::EPSILON * x {
            // rounding of λ alone moves H by about ulp(λ)·|H'|
            let tol = (1e-12 * sec.scale(x)).max(8.0 * f64::EPSILON * x * hp.abs());
            if h.abs() > tol {
                return Err(Error::Nonconvergence(format!("H = {h:e} at λ = {x}")));
            }
            return Ok(next.clamp(lo, hi));
        }
        x = if next >= lo && next <= hi { next } else { 0.5 * (lo + hi) };
        if hi - lo <= 4.0 * f64::EPSILON * x {
            return Ok(x);
        }
    }
    Err(Error::Nonconvergence(format!("no convergence on ({a}, {b})")))
}

/// Positive eigenvalues with certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub g: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Strictly increasing positive eigenvalues.
    pub positive: Vec<f64>,
    /// Sign-change bracket of each eigenvalue.
    pub brackets: Vec<(f64, f64)>,
    pub has_zero_mode: bool,
    /// Whether an eigenvalue lies below the first zero of J_{g−1/2}.
    pub first_interval_root: bool,
    /// Sign applied to the stored values: +1 for the positive spectrum,
    /// −1 for the negative spectrum viewed through the flipped extension.
    pub sign: f64,
}

impl Spectrum {
    /// Eigenvalues with the sign applied.
    pub fn values(&self) -> Vec<f64> {
        self.positive.iter().map(|v| self.sign * v).collect()
    }
}

fn limiting(ext: &Extension, g: Coupling, nu: f64, n_max: usize, zero_mode: bool) -> Result<Spectrum> {
    let z = bessel_zeros(nu, n_max)?;
    Ok(Spectrum {
        g: g.value(),
        alpha: ext.alpha(),
        beta: ext.beta(),
        brackets: z.iter().map(|&v| (v, v)).collect(),
        positive: z,
        has_zero_mode: zero_mode,
        first_interval_root: false,
        sign: 1.0,
    })
}

/// The first `n_max` positive eigenvalues of the extension.
pub fn positive_eigenvalues(ext: &Extension, g: Coupling, n_max: usize) -> Result<Spectrum> {
    if n_max == 0 {
        return Err(Error::Config("n_max must be at least 1".into()));
    }
    if ext.is_dirichlet() {
        return limiting(ext, g, g.nu2(), n_max, false);
    }
    if ext.is_neumann() {
        return limiting(ext, g, g.nu1(), n_max, true);
    }
    let r = rho(ext, g)?;
    let gv = g.value();
    // H(0⁺) has the sign of −ρ
    let (positive, brackets, first) = secular_roots(&Secular::first_order(gv, r), -r.signum(), n_max)?;
    Ok(Spectrum {
        g: gv,
        alpha: ext.alpha(),
        beta: ext.beta(),
        positive,
        brackets,
        has_zero_mode: false,
        first_interval_root: first,
        sign: 1.0,
    })
}

/// The first `n_max` positive roots of a secular function, given the sign of
/// H(0⁺): at most one in (0, j₁) and exactly one between consecutive zeros
/// of J_{g−1/2}. Returns the roots, their brackets and whether (0, j₁)
/// holds a root.
pub(crate) fn secular_roots(sec: &Secular, h0: f64, n_max: usize) -> Result<(Vec<f64>, Vec<(f64, f64)>, bool)> {
    let zeros = bessel_zeros(sec.g - 0.5, n_max + 1)?;
    let mut positive = Vec::with_capacity(n_max);
    let mut brackets = Vec::with_capacity(n_max);

    let j1 = zeros[0];
    let hj1 = sec.eval(j1).0;
    let steps = 100;
    let mut prev_x = 0.0;
    let mut prev_h = h0;
    let mut first = false;
    for i in 1..=steps {
        let x = j1 * i as f64 / steps as f64;
        let hx = if i == steps { hj1 } else { sec.eval(x).0 };
        if (hx > 0.0) != (prev_h > 0.0) {
            let a = if prev_x == 0.0 { 1e-3 * j1 } else { prev_x };
            let ha = sec.eval(a).0;
            if (ha > 0.0) == (hx > 0.0) {
                return Err(Error::Structural(format!("eigenvalue below {a}")));
            }
            if first {
                return Err(Error::Structural(format!("two eigenvalues in (0, {j1})")));
            }
            first = true;
            positive.push(root_of(sec, a, x, ha, hx)?);
            brackets.push((prev_x, x));
        }
        prev_x = x;
        prev_h = hx;
    }

    let mut ha = hj1;
    for w in zeros.windows(2) {
        if positive.len() == n_max {
            break;
        }
        let hb = sec.eval(w[1]).0;
        positive.push(root_of(sec, w[0], w[1], ha, hb)?);
        brackets.push((w[0], w[1]));
        ha = hb;
    }
    Ok((positive, brackets, first))
}

/// The negative eigenvalues: −(positive eigenvalues of (α, −β)).
pub fn negative_eigenvalues(ext: &Extension, g: Coupling, n_max: usize) -> Result<Spectrum> {
    let mut s = positive_eigenvalues(&ext.flipped(), g, n_max)?;
    s.alpha = ext.alpha();
    s.beta = ext.beta();
    s.sign = -1.0;
    Ok(s)
}

/// The eigenvalue in the interval (j_k, j_{k+1}) between consecutive zeros
/// of J_{g−1/2}, for finite nonzero ρ.
pub fn eigenvalue_between_zeros(g: f64, rho: f64, jk: f64, jk1: f64) -> Result<f64> {
    let ha = h_and_prime(g, rho, jk).0;
    let hb = h_and_prime(g, rho, jk1).0;
    root_in(g, rho, jk, jk1, ha, hb)
}

/// H(λ) = λ^{2g} J_{1/2−g}(λ) − ρ J_{g−1/2}(λ).
pub fn secular_h(g: f64, rho: f64, lambda: f64) -> f64 {
    h_and_prime(g, rho, lambda).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::bessel_zero;

    fn c(g: f64) -> Coupling {
        Coupling::new(g).unwrap()
    }

    #[test]
    fn rho_is_odd_in_beta() {
        let a = rho(&Extension::new(1.0, 0.4).unwrap(), c(0.25)).unwrap();
        let b = rho(&Extension::new(1.0, -0.4).unwrap(), c(0.25)).unwrap();
        assert!((a + b).abs() < 1e-15);
    }

    #[test]
    fn rho_at_zero_coupling() {
        let e = Extension::new(2.0, 3.0).unwrap();
        assert!((rho(&e, c(0.0)).unwrap() + 1.5).abs() < 1e-14);
        assert_eq!(rho(&Extension::neumann(), c(0.3)).unwrap(), 0.0);
        assert!(rho(&Extension::dirichlet(), c(0.3)).is_err());
    }

    #[test]
    fn normalisation() {
        let e = Extension::new(-3.0, 4.0).unwrap();
        assert!((e.alpha() - 0.6).abs() < 1e-15 && (e.beta() + 0.8).abs() < 1e-15);
        assert_eq!(Extension::new(0.0, -2.0).unwrap(), Extension::dirichlet());
    }

    #[test]
    fn f_is_tan_at_zero_coupling() {
        let f = secular_f(std::f64::consts::FRAC_PI_4, c(0.0)).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f_vanishes_at_numerator_zeros() {
        for n in 1..=3 {
            let z = bessel_zero(0.5 - 0.2, n).unwrap();
            assert!(secular_f(z, c(0.2)).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn f_pole_is_reported() {
        let z = bessel_zero(-0.5, 2).unwrap();
        assert!(matches!(secular_f(z, c(0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn dirichlet_spectrum_is_zeros() {
        let s = positive_eigenvalues(&Extension::dirichlet(), c(0.3), 3).unwrap();
        for n in 1..=3 {
            assert_eq!(s.positive[n - 1], bessel_zero(-0.2, n).unwrap());
        }
        assert!(!s.has_zero_mode);
    }

    #[test]
    fn neumann_has_zero_mode() {
        let s = positive_eigenvalues(&Extension::neumann(), c(0.3), 4).unwrap();
        assert!(s.has_zero_mode);
        assert_eq!(s.positive[3], bessel_zero(0.2, 4).unwrap());
    }

    #[test]
    fn tan_equals_three() {
        // g = 0, β/α = −3 gives tan λ = 3
        let s = positive_eigenvalues(&Extension::new(1.0, -3.0).unwrap(), c(0.0), 5).unwrap();
        assert!(s.first_interval_root);
        for (n, v) in s.positive.iter().enumerate() {
            let exact = 3f64.atan() + n as f64 * std::f64::consts::PI;
            assert!((v - exact).abs() < 1e-12, "{n}");
        }
    }

    #[test]
    fn first_interval_empty_for_negative_rho() {
        let s = positive_eigenvalues(&Extension::new(1.0, 3.0).unwrap(), c(0.0), 3).unwrap();
        assert!(!s.first_interval_root);
        assert!((s.positive[0] - (std::f64::consts::PI - 3f64.atan())).abs() < 1e-12);
    }

    #[test]
    fn negative_spectrum_is_flipped_positive() {
        let e = Extension::new(1.0, 1.0).unwrap();
        let n = negative_eigenvalues(&e, c(-0.3), 6).unwrap();
        let p = positive_eigenvalues(&e.flipped(), c(-0.3), 6).unwrap();
        assert_eq!(n.positive, p.positive);
        assert!(n.values().iter().all(|v| *v < 0.0));
    }

    #[test]
    fn interlacing() {
        let g = c(0.3);
        let e = Extension::new(1.0, 1.0).unwrap();
        let s = positive_eigenvalues(&e, g, 50).unwrap();
        let z = bessel_zeros(g.nu2(), 51).unwrap();
        let off = usize::from(s.first_interval_root);
        for n in 0..(50 - off) {
            let v = s.positive[n + off];
            assert!(v > z[n] && v < z[n + 1]);
        }
    }
}
