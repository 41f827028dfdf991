//! Generalized asymptotic series in powers λ^{a + 2g·b} along the rays
//! arg λ = ±π/2.
//!
//! The integer part comes from the Hankel expansion. With u = −iσ/(2λ),
//! S(u) = Σ ⟨ν,k⟩ u^k and M = 2u² S'(u)/S(u) one has
//! J'_ν/J_ν = −1/(2λ) − iσ(1 + M), so ∂_λ Tr G_D = 4g²u² − 2M − M² is a
//! power series in u with real coefficients t_k, and A_k = t_k (−iσ/2)^k.
//! The series algebra runs in double-double so the coefficients can be
//! subtracted from double-double ray values.
//!
//! On the rays J_{1/2−g}/J_{g−1/2} = e^{iσπ(1/2−g)} up to exponentially
//! small terms, which gives τ its powers λ^{±2gk}.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::DD;
use crate::error::{Error, Result};
use crate::operator_model::{rho, Coupling, Extension};
use crate::special_functions::Branch;

use std::f64::consts::PI;

/// Largest truncation order.
pub const K_MAX: usize = 12;

/// Exponent a + 2g·b with integers a, b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Exponent {
    pub a: i32,
    pub b: i32,
}

impl Exponent {
    pub fn int(a: i32) -> Exponent {
        Exponent { a, b: 0 }
    }

    pub fn value(self, g: f64) -> f64 {
        self.a as f64 + 2.0 * g * self.b as f64
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}·2g"),
            (a, b) => write!(f, "{a}{:+}·2g", b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponent: Exponent,
    /// Numerical value of the exponent.
    pub power: f64,
    pub coeff: Complex64,
}

/// Σ c_j λ^{e_j}, exponents strictly decreasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedSeries {
    pub branch: Branch,
    pub g: f64,
    pub terms: Vec<Term>,
    pub anchor: String,
}

impl GeneralizedSeries {
    pub fn new(branch: Branch, g: f64, anchor: &str, raw: Vec<(Exponent, Complex64)>) -> Self {
        let mut terms: Vec<Term> = Vec::new();
        for (e, c) in raw {
            match terms.iter_mut().find(|t| t.exponent == e) {
                Some(t) => t.coeff += c,
                None => terms.push(Term { exponent: e, power: e.value(g), coeff: c }),
            }
        }
        terms.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        terms.sort_by(|x, y| {
            y.power
                .total_cmp(&x.power)
                .then(y.exponent.b.cmp(&x.exponent.b))
        });
        GeneralizedSeries { branch, g, terms, anchor: anchor.to_string() }
    }

    fn raw(&self) -> Vec<(Exponent, Complex64)> {
        self.terms.iter().map(|t| (t.exponent, t.coeff)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient at an exact exponent, zero if absent.
    pub fn coeff(&self, e: Exponent) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.exponent == e)
            .map_or(Complex64::new(0.0, 0.0), |t| t.coeff)
    }

    pub fn add(&self, other: &Self, anchor: &str) -> Self {
        let mut raw = self.raw();
        raw.extend(other.raw());
        Self::new(self.branch, self.g, anchor, raw)
    }

    pub fn scale(&self, s: Complex64, anchor: &str) -> Self {
        Self::new(self.branch, self.g, anchor, self.raw().into_iter().map(|(e, c)| (e, c * s)).collect())
    }

    pub fn mul(&self, other: &Self, anchor: &str) -> Self {
        let mut raw = Vec::new();
        for x in &self.terms {
            for y in &other.terms {
                let e = Exponent { a: x.exponent.a + y.exponent.a, b: x.exponent.b + y.exponent.b };
                raw.push((e, x.coeff * y.coeff));
            }
        }
        Self::new(self.branch, self.g, anchor, raw)
    }

    /// Term-by-term d/dλ.
    pub fn derivative(&self, anchor: &str) -> Self {
        let raw = self
            .terms
            .iter()
            .map(|t| (Exponent { a: t.exponent.a - 1, b: t.exponent.b }, t.coeff * t.power))
            .collect();
        Self::new(self.branch, self.g, anchor, raw)
    }

    /// Σ c λ^e with the principal branch of λ^e.
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.coeff * lambda.powf(t.power)).sum()
    }

    /// Pairs of distinct exact exponents whose values lie within `tol`.
    pub fn collisions(&self, tol: f64) -> Vec<(Exponent, Exponent)> {
        let mut out = Vec::new();
        for (i, x) in self.terms.iter().enumerate() {
            for y in &self.terms[i + 1..] {
                if (x.power - y.power).abs() <= tol {
                    out.push((x.exponent, y.exponent));
                }
            }
        }
        out
    }
}

fn check_k(k: usize) -> Result<()> {
    if k > K_MAX {
        return Err(Error::Config(format!("truncation order {k} exceeds {K_MAX}")));
    }
    Ok(())
}

/// Power-series coefficients of S(u) = Σ ⟨ν,k⟩ u^k for 2ν given exactly.
fn hankel_series(two_nu: DD, n: usize) -> Vec<DD> {
    let mu = two_nu * two_nu;
    let mut out = vec![DD::ONE];
    let mut p = DD::ONE;
    for j in 1..n {
        let odd = (2 * j - 1) as f64;
        p = p * (mu - odd * odd) / (4 * j) as f64;
        out.push(p);
    }
    out
}

fn mul_series(x: &[DD], y: &[DD], n: usize) -> Vec<DD> {
    let mut out = vec![DD::ZERO; n];
    for (i, a) in x.iter().enumerate().take(n) {
        for (j, b) in y.iter().enumerate().take(n - i) {
            out[i + j] += *a * *b;
        }
    }
    out
}

fn inv_series(x: &[DD], n: usize) -> Vec<DD> {
    let mut out = vec![DD::ZERO; n];
    out[0] = DD::ONE / x[0];
    for k in 1..n {
        let mut s = DD::ZERO;
        for j in 1..=k.min(x.len() - 1) {
            s += x[j] * out[k - j];
        }
        out[k] = -(s * out[0]);
    }
    out
}

/// M(u) = 2u² S'(u)/S(u) up to u^{n−1}.
fn m_series(two_nu: DD, n: usize) -> Vec<DD> {
    let s = hankel_series(two_nu, n);
    let mut ds = vec![DD::ZERO; n];
    for k in 1..n {
        ds[k - 1] = s[k] * k as f64;
    }
    let q = mul_series(&ds, &inv_series(&s, n), n);
    let mut m = vec![DD::ZERO; n];
    for k in 2..n {
        m[k] = q[k - 2] * 2.0;
    }
    m
}

/// t_k, k = 0..=kmax, with ∂_λ Tr G_D ~ Σ t_k u^k.
pub fn dgd_u_coefficients(g: f64, kmax: usize) -> Vec<DD> {
    let n = kmax + 1;
    let two_nu = DD::new(2.0 * g) - 1.0;
    let m = m_series(two_nu, n);
    let m2 = mul_series(&m, &m, n);
    let gd = DD::new(g);
    (0..n)
        .map(|k| {
            let mut t = -(m[k] * 2.0) - m2[k];
            if k == 2 {
                t += gd * gd * 4.0;
            }
            t
        })
        .collect()
}

/// Coefficients of M_{1/2−g} − M_{g−1/2} through u^{kmax}: zero term by term
/// because the Hankel symbols depend on ν².
pub fn diff_higher_orders(g: f64, kmax: usize) -> Vec<DD> {
    let two_nu1 = DD::ONE - 2.0 * g;
    let two_nu2 = DD::new(2.0 * g) - 1.0;
    let a = m_series(two_nu1, kmax + 1);
    let b = m_series(two_nu2, kmax + 1);
    a.iter().zip(&b).map(|(x, y)| *x - *y).collect()
}

/// (−iσ)^k as a unit complex number, exactly.
fn i_power(sigma: f64, k: usize) -> Complex64 {
    let base = match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    if sigma < 0.0 && k % 2 == 1 {
        -base
    } else {
        base
    }
}

/// Σ_{k=2}^{K} A_k λ^{−k} at λ = iμ, where it is real:
/// A_k (iμ)^{−k} = t_k (−1/(2μ))^k.
pub fn dgd_ray_partial_sum(g: f64, k: usize, mu: f64) -> DD {
    let t = dgd_u_coefficients(g, k);
    let w = -(DD::ONE / DD::new(2.0 * mu));
    let mut s = DD::ZERO;
    for j in (2..=k).rev() {
        s = (s + t[j]) * w;
    }
    s * w
}

/// A_k(g, σ) for k ≥ 2.
pub fn a_coefficient(g: f64, sigma: f64, k: usize) -> Result<Complex64> {
    check_k(k)?;
    let t = dgd_u_coefficients(g, k)[k];
    Ok(i_power(sigma, k) * (t.to_f64() / 2f64.powi(k as i32)))
}

/// ∂_λ Tr G_D ~ Σ_{k=2}^{K} A_k λ^{−k}.
pub fn series_trace_dgd(g: f64, sigma: f64, k: usize) -> Result<GeneralizedSeries> {
    check_k(k)?;
    let t = dgd_u_coefficients(g, k);
    let raw = (2..=k)
        .map(|j| {
            let c = i_power(sigma, j) * (t[j].to_f64() / 2f64.powi(j as i32));
            (Exponent::int(-(j as i32)), c)
        })
        .collect();
    Ok(GeneralizedSeries::new(Branch::of(sigma), g, "d/dλ Tr G_D", raw))
}

/// Tr G_D − Tr G_N ~ 2g/λ; every higher term cancels.
pub fn series_trace_diff(g: f64, sigma: f64) -> GeneralizedSeries {
    GeneralizedSeries::new(
        Branch::of(sigma),
        g,
        "Tr G_D - Tr G_N",
        vec![(Exponent::int(-1), Complex64::new(2.0 * g, 0.0))],
    )
}

/// τ(λ) on the ray with sign σ.
pub fn series_tau(g: f64, ext: &Extension, sigma: f64, k: usize) -> Result<GeneralizedSeries> {
    check_k(k)?;
    let br = Branch::of(sigma);
    if ext.is_dirichlet() {
        return Ok(GeneralizedSeries::new(br, g, "tau", vec![]));
    }
    if ext.is_neumann() {
        return Ok(GeneralizedSeries::new(br, g, "tau", vec![(Exponent::int(0), Complex64::new(1.0, 0.0))]));
    }
    let r = rho(ext, Coupling::new(g)?)?;
    let phase = Complex64::from_polar(1.0, sigma * PI * (0.5 - g));
    let one = Complex64::new(1.0, 0.0);
    let raw = if g == 0.0 {
        // F → e^{iσπ/2} exactly: τ is constant
        vec![(Exponent::int(0), one - one / (one - phase / r))]
    } else if g < 0.0 {
        let w = phase / r;
        (1..=k).map(|j| (Exponent { a: 0, b: j as i32 }, -w.powi(j as i32))).collect()
    } else {
        let v = r / phase;
        (0..=k).map(|j| (Exponent { a: 0, b: -(j as i32) }, v.powi(j as i32))).collect()
    };
    Ok(GeneralizedSeries::new(br, g, "tau", raw))
}

pub fn series_tau_prime(g: f64, ext: &Extension, sigma: f64, k: usize) -> Result<GeneralizedSeries> {
    Ok(series_tau(g, ext, sigma, k)?.derivative("tau'"))
}

/// ∂_λ[τ·(Tr G_D − Tr G_N)]. For g < 0 the terms are
/// −2g w^k (2gk−1) λ^{2gk−2}, w = e^{iσπ(1/2−g)}/ρ, k ≥ 1; for g > 0,
/// −2g v^k (2gk+1) λ^{−2gk−2}, v = ρ e^{−iσπ(1/2−g)}, k ≥ 0.
pub fn series_product_derivative(g: f64, ext: &Extension, sigma: f64, k: usize) -> Result<GeneralizedSeries> {
    check_k(k)?;
    let br = Branch::of(sigma);
    let anchor = "d/dλ[tau (Tr G_D - Tr G_N)]";
    if ext.is_dirichlet() || g == 0.0 {
        return Ok(GeneralizedSeries::new(br, g, anchor, vec![]));
    }
    if ext.is_neumann() {
        return Ok(GeneralizedSeries::new(br, g, anchor, vec![(Exponent::int(-2), Complex64::new(-2.0 * g, 0.0))]));
    }
    let r = rho(ext, Coupling::new(g)?)?;
    let phase = Complex64::from_polar(1.0, sigma * PI * (0.5 - g));
    let raw = if g < 0.0 {
        let w = phase / r;
        (1..=k)
            .map(|j| {
                let jf = j as f64;
                (Exponent { a: -2, b: j as i32 }, -2.0 * g * w.powi(j as i32) * (2.0 * g * jf - 1.0))
            })
            .collect()
    } else {
        let v = r / phase;
        (0..=k)
            .map(|j| {
                let jf = j as f64;
                (Exponent { a: -2, b: -(j as i32) }, -2.0 * g * v.powi(j as i32) * (2.0 * g * jf + 1.0))
            })
            .collect()
    };
    Ok(GeneralizedSeries::new(br, g, anchor, raw))
}

/// Tr G² = ∂_λ Tr G_D − ∂_λ[τ (Tr G_D − Tr G_N)] through order `k` in each part.
pub fn series_trace_g2(g: f64, ext: &Extension, sigma: f64, k: usize) -> Result<GeneralizedSeries> {
    let d = series_trace_dgd(g, sigma, k)?;
    let p = series_product_derivative(g, ext, sigma, k)?;
    Ok(d.add(&p.scale(Complex64::new(-1.0, 0.0), ""), "Tr G^2"))
}

/// Least-squares fit of samples (μ, f(μ)) by Σ_{k=kmin}^{kmax} c_k μ^{−k},
/// in double-double.
pub fn fit_inverse_powers(samples: &[(f64, DD)], kmin: usize, kmax: usize) -> Vec<DD> {
    let n = kmax - kmin + 1;
    let mu0 = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    // basis in t = μ₀/μ ∈ (0, 1]
    let mut ata = vec![vec![DD::ZERO; n]; n];
    let mut atb = vec![DD::ZERO; n];
    for &(mu, f) in samples {
        let t = DD::new(mu0) / DD::new(mu);
        let row: Vec<DD> = (0..n).map(|j| t.powi((kmin + j) as i32)).collect();
        for i in 0..n {
            atb[i] += row[i] * f;
            for j in 0..n {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let x = solve_dd(ata, atb);
    (0..n).map(|j| x[j] * DD::new(mu0).powi((kmin + j) as i32)).collect()
}

fn solve_dd(mut m: Vec<Vec<DD>>, mut r: Vec<DD>) -> Vec<DD> {
    let n = r.len();
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| m[a][k].abs().hi.total_cmp(&m[b][k].abs().hi)).unwrap();
        m.swap(k, p);
        r.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
            let v = r[k];
            r[i] -= f * v;
        }
    }
    let mut x = vec![DD::ZERO; n];
    for k in (0..n).rev() {
        let mut s = r[k];
        for j in k + 1..n {
            s -= m[k][j] * x[j];
        }
        x[k] = s / m[k][k];
    }
    x
}
