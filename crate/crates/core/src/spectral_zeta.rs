//! Spectral functions ζ₊, ζ and η of the extension (α,β), their poles and
//! residues, and the scaling covariance of the anomalous residues.
//!
//! ζ₊(s) = Σ λ_n^{−s} over the positive eigenvalues. For Re s > 1 it is a
//! direct sum with an Euler–Maclaurin tail. Elsewhere it is continued from
//! (1/(2πi(s−1))) ∫ λ^{1−s} Tr G²(λ) dλ along the imaginary axis, indented
//! to the right of 0 by a semicircle. On μ ≥ 1 the asymptotic series of
//! Tr G² is subtracted and its ray integrals are added back in closed form.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    a_coefficient, dgd_ray_partial_sum, series_product_derivative, series_trace_g2, GeneralizedSeries, Term,
    K_MAX,
};
use crate::dd::DD;
use crate::error::{Error, Result};
use crate::operator_model::{positive_eigenvalues, rho, Coupling, Extension};
use crate::quadrature::gauss_legendre;
use crate::resolvent::{ray_trace_g2, ray_values, trace_g2};
use crate::special_functions::{bessel_j_and_prime, bessel_zero, bessel_zeros};

type C = Complex64;

/// Smallest Re s accepted by the direct sum.
pub const SUM_STRIP: f64 = 1.05;
/// Evaluations closer than this to a pole are refused.
pub const POLE_EXCLUSION: f64 = 1e-3;
/// Pole locations closer than this are reported as collisions.
pub const COLLISION_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationConfig {
    /// Subtraction order N.
    pub order: usize,
    /// Ray cutoff.
    pub mu_max: f64,
    /// Relative tolerance on the quadrature error estimate.
    pub quad_tol: f64,
    /// Eigenvalue count for direct sums.
    pub n_eigs: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig { order: 6, mu_max: 1e4, quad_tol: 1e-9, n_eigs: 100_000 }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order < 2 || self.order >= K_MAX {
            return Err(Error::Config(format!("subtraction order must lie in [2, {}]", K_MAX - 1)));
        }
        if !(self.mu_max > 1.0 && self.mu_max.is_finite()) {
            return Err(Error::Config("mu_max must exceed 1".into()));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::Config("quad_tol must be positive".into()));
        }
        if self.n_eigs == 0 {
            return Err(Error::Config("n_eigs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sum,
    Continuation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaEvaluation {
    pub s: C,
    pub value: C,
    pub method: Method,
    pub error_estimate: f64,
    /// Lower bound on Re s for the method used.
    pub strip_bound: f64,
    /// Set when a zero mode exists and is left out of the sum.
    pub zero_mode_excluded: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleSource {
    #[serde(rename = "s=1")]
    One,
    #[serde(rename = "D-series")]
    DSeries,
    #[serde(rename = "anomalous")]
    Anomalous,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleEntry {
    pub location: f64,
    pub residue: C,
    pub source: PoleSource,
    /// Series index k (0 for s = 1).
    pub k: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PoleTable {
    pub entries: Vec<PoleEntry>,
    /// Pairs of locations closer than [`COLLISION_TOL`]; residues are kept
    /// separate.
    pub collisions: Vec<(f64, f64)>,
}

impl PoleTable {
    fn finish(mut entries: Vec<PoleEntry>) -> PoleTable {
        entries.sort_by(|a, b| b.location.total_cmp(&a.location).then(a.k.cmp(&b.k)));
        let mut collisions = Vec::new();
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                if (entries[i].location - entries[j].location).abs() < COLLISION_TOL {
                    collisions.push((entries[i].location, entries[j].location));
                }
            }
        }
        PoleTable { entries, collisions }
    }

    pub fn find(&self, source: PoleSource, k: usize) -> Option<&PoleEntry> {
        self.entries.iter().find(|e| e.source == source && e.k == k)
    }
}

fn bits(ext: &Extension, g: f64) -> (u64, u64, u64) {
    (g.to_bits(), ext.alpha().to_bits(), ext.beta().to_bits())
}

/// Lower bound of the continuation strip for order N.
pub fn strip_bound(ext: &Extension, g: f64, order: usize) -> f64 {
    let d = 1.0 - order as f64;
    if ext.is_dirichlet() || ext.is_neumann() || g == 0.0 {
        d
    } else {
        d.max(-2.0 * g.abs() * (order + 1) as f64)
    }
}

// ---------------------------------------------------------------------------
// Direct sums

fn cached_spectrum(ext: &Extension, g: f64, n: usize) -> Result<Arc<Vec<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u64), Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = bits(ext, g);
    if let Some(v) = cache.lock().expect("spectrum cache poisoned").get(&key) {
        if v.len() >= n {
            return Ok(v.clone());
        }
    }
    let v = Arc::new(positive_eigenvalues(ext, Coupling::new(g)?, n)?.positive);
    cache.lock().expect("spectrum cache poisoned").insert(key, v.clone());
    Ok(v)
}

/// dψ/dλ for the phase θ_ν(λ) = λ − (ν/2 + 1/4)π + ψ(λ) of J_ν.
fn phase_correction_prime(nu: f64, x: f64) -> f64 {
    let m = 4.0 * nu * nu;
    let c = [
        (m - 1.0) / 2.0,
        (m - 1.0) * (m - 25.0) / 6.0,
        (m - 1.0) * (m * m - 114.0 * m + 1073.0) / 5.0,
        (m - 1.0) * (5.0 * m.powi(3) - 1535.0 * m * m + 54703.0 * m - 375733.0) / 14.0,
    ];
    let y = 4.0 * x;
    c.iter()
        .enumerate()
        .map(|(j, cj)| -4.0 * cj * (2 * j + 1) as f64 * y.powi(-(2 * j as i32 + 2)))
        .sum()
}

/// Φ'(λ) − 1, where the eigenvalues satisfy Φ(λ_n) = const + nπ with
/// Φ = θ_{1/2−g} − arctan R, R = cot a − λ^{2g}/(ρ sin a), a = π(1/2−g).
fn counting_density_excess(ext: &Extension, g: f64, r: Option<f64>, lam: f64) -> f64 {
    let h = phase_correction_prime(0.5 - g, lam);
    match r {
        Some(r) if !ext.is_neumann() && g != 0.0 => {
            let a = PI * (0.5 - g);
            let rr = 1.0 / a.tan() - lam.powf(2.0 * g) / (r * a.sin());
            let rp = -2.0 * g * lam.powf(2.0 * g - 1.0) / (r * a.sin());
            h - rp / (1.0 + rr * rr)
        }
        _ => h,
    }
}

/// ζ₊(s) as Σ_{n ≤ n_eigs} λ_n^{−s} plus an Euler–Maclaurin tail.
pub fn zeta_plus_sum(ext: &Extension, g: f64, s: C, n_eigs: usize) -> Result<ZetaEvaluation> {
    if s.re <= SUM_STRIP || !s.re.is_finite() {
        return Err(Error::OutOfStrip { s: s.to_string(), bound: SUM_STRIP });
    }
    if n_eigs < 2 {
        return Err(Error::Config("n_eigs must be at least 2".into()));
    }
    let spec = cached_spectrum(ext, g, n_eigs)?;
    let lam = &spec[..n_eigs];
    let mut sum = C::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for &l in lam.iter().rev() {
        let t = (-s * l.ln()).exp();
        abs_sum += t.norm();
        sum += t;
    }

    let r = if ext.is_dirichlet() { None } else { Some(rho(ext, Coupling::new(g)?)?) };
    let ln_n = lam[n_eigs - 1].ln();
    let lam_n = lam[n_eigs - 1];
    // (1/π) ∫_{λ_N}^∞ λ^{−s} Φ'(λ) dλ with λ = λ_N e^t
    let tail_int = |deg: usize| -> C {
        let rule = gauss_legendre(deg);
        let mut acc = C::new(0.0, 0.0);
        for p in 0..80 {
            for &(x, w) in rule.iter() {
                let t = p as f64 + 0.5 * (x + 1.0);
                let l = lam_n * t.exp();
                let h = counting_density_excess(ext, g, r, l);
                acc += ((1.0 - s) * (ln_n + t)).exp() * (h * 0.5 * w);
            }
        }
        acc
    };
    let (i16, i24) = (tail_int(16), tail_int(24));
    let lead = ((1.0 - s) * ln_n).exp() / (s - 1.0);
    let phi_p = 1.0 + counting_density_excess(ext, g, r, lam_n);
    let f_n = (-s * ln_n).exp();
    let dl = PI / phi_p;
    let f1 = -s * f_n / lam_n * dl;
    let f3 = -s * (-s - 1.0) * (-s - 2.0) * f_n / lam_n.powi(3) * dl.powi(3);
    let tail = (lead + i24) / PI - f_n * 0.5 - f1 / 12.0 + f3 / 720.0;
    let err = (i24 - i16).norm() / PI + f3.norm() / 720.0 + 4.0 * f64::EPSILON * (abs_sum + tail.norm());
    Ok(ZetaEvaluation {
        s,
        value: sum + tail,
        method: Method::Sum,
        error_estimate: err,
        strip_bound: SUM_STRIP,
        zero_mode_excluded: ext.is_neumann(),
    })
}

// ---------------------------------------------------------------------------
// Continuation

#[derive(Clone, Copy, Debug)]
struct Node {
    x: f64,
    w: f64,
    v: C,
}

struct Rule {
    /// Upper ray: x = μ, v = Tr G²(iμ), minus the series for μ ≥ 1.
    ray: Vec<Node>,
    /// Semicircle λ = r₀e^{iφ}: x = φ, v = Tr G²(λ).
    semi: Vec<Node>,
}

struct Continuation {
    r0: f64,
    rules: [Rule; 2],
    /// Upper-branch series of Tr G² through order N.
    series: Vec<Term>,
    /// Leading terms beyond order N.
    omitted: Vec<Term>,
    strip: f64,
}

/// Radius of the semicircle around 0: below half the distance to the
/// nearest eigenvalue of either sign and to the first zeros of J_{±(1/2−g)}.
fn indentation_radius(ext: &Extension, g: f64) -> Result<f64> {
    let cg = Coupling::new(g)?;
    let mut r = 0.5f64;
    r = r.min(0.5 * positive_eigenvalues(ext, cg, 1)?.positive[0]);
    r = r.min(0.5 * positive_eigenvalues(&ext.flipped(), cg, 1)?.positive[0]);
    r = r.min(0.5 * bessel_zero(g - 0.5, 1)?);
    r = r.min(0.5 * bessel_zero(0.5 - g, 1)?);
    Ok(r)
}

fn ray_panels(r0: f64, mu_max: f64) -> Vec<(f64, f64)> {
    let mut p = Vec::new();
    let mut b = 1.0;
    while b > r0 {
        let a = (0.5 * b).max(r0);
        p.push((a, b));
        b = a;
    }
    p.reverse();
    let mut a = 1.0;
    while a < mu_max {
        let b = (2.0 * a).min(mu_max);
        p.push((a, b));
        a = b;
    }
    p
}

fn ray_integrand(ext: &Extension, g: f64, order: usize, anomalous: &GeneralizedSeries, mu: f64) -> Result<C> {
    let subtract = mu >= 1.0;
    if ext.is_neumann() {
        let v = ray_values(mu, g);
        let mut dgd = v.dgd;
        let mut tau = v.d_mu;
        if subtract {
            dgd -= dgd_ray_partial_sum(g, order, mu);
            tau += DD::new(2.0 * g) / (DD::new(mu) * mu);
        }
        return Ok(C::new(dgd.to_f64() + tau.to_f64(), 0.0));
    }
    let (dgd, tau) = ray_trace_g2(mu, ext, g)?;
    if !subtract {
        return Ok(tau + dgd.to_f64());
    }
    let rem = (dgd - dgd_ray_partial_sum(g, order, mu)).to_f64();
    Ok(tau + anomalous.eval(C::new(0.0, mu)) + rem)
}

fn build_rule(
    ext: &Extension,
    g: f64,
    order: usize,
    r0: f64,
    mu_max: f64,
    degs: (usize, usize),
    anomalous: &GeneralizedSeries,
) -> Result<Rule> {
    let gl = gauss_legendre(degs.0);
    let mut ray = Vec::new();
    for (a, b) in ray_panels(r0, mu_max) {
        let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
        for &(x, w) in gl.iter() {
            let mu = c + h * x;
            ray.push(Node { x: mu, w: w * h, v: ray_integrand(ext, g, order, anomalous, mu)? });
        }
    }
    let gl = gauss_legendre(degs.1);
    let mut semi = Vec::new();
    for &(x, w) in gl.iter() {
        let phi = 0.5 * PI * x;
        let lam = C::from_polar(r0, phi);
        semi.push(Node { x: phi, w: 0.5 * PI * w, v: trace_g2(lam, ext, g)? });
    }
    Ok(Rule { ray, semi })
}

fn continuation(ext: &Extension, g: f64, cfg: &ContinuationConfig) -> Result<Arc<Continuation>> {
    type Key = (u64, u64, u64, usize, u64);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Continuation>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let (a, b, c) = bits(ext, g);
    let key = (a, b, c, cfg.order, cfg.mu_max.to_bits());
    if let Some(v) = cache.lock().expect("continuation cache poisoned").get(&key) {
        return Ok(v.clone());
    }
    let n = cfg.order;
    let r0 = indentation_radius(ext, g)?;
    let anomalous = series_product_derivative(g, ext, 1.0, n)?;
    let rules = [
        build_rule(ext, g, n, r0, cfg.mu_max, (24, 48), &anomalous)?,
        build_rule(ext, g, n, r0, cfg.mu_max, (32, 64), &anomalous)?,
    ];
    let series = series_trace_g2(g, ext, 1.0, n)?.terms;
    let longer = series_trace_g2(g, ext, 1.0, n + 1)?.terms;
    let omitted: Vec<Term> =
        longer.into_iter().filter(|t| !series.iter().any(|u| u.exponent == t.exponent)).collect();
    let strip = strip_bound(ext, g, n);
    let cont = Arc::new(Continuation { r0, rules, series, omitted, strip });
    cache.lock().expect("continuation cache poisoned").insert(key, cont.clone());
    Ok(cont)
}

/// (e^δ − 1)/δ.
fn exprel(d: C) -> C {
    if d.norm() < 0.5 {
        let mut term = C::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..24 {
            term *= d / k as f64;
            sum += term;
        }
        sum
    } else {
        (d.exp() - 1.0) / d
    }
}

/// Both ray integrals over μ ∈ [1, ∞) of c λ^e, with the phases e^{±iπ(1−s)/2}:
/// [c e^{z} + c̄ e^{−z}]/(s − s₀), z = iπ(1−s+e)/2, s₀ = 2+e. Written so that
/// the pole cancels exactly when Im c = 0.
fn added_back(t: &Term, s: C) -> C {
    let s0 = 2.0 + t.power;
    let c = t.coeff;
    let ds = s - s0;
    let d = C::new(0.0, -0.5 * PI) * ds;
    let regular = -(0.5 * PI) * (c * exprel(d) + c.conj() * exprel(-d));
    if c.im == 0.0 {
        regular
    } else {
        C::new(2.0 * c.im, 0.0) / ds + regular
    }
}

fn pole_candidates(cont: &Continuation) -> Vec<f64> {
    let mut p = vec![1.0];
    p.extend(cont.series.iter().filter(|t| t.coeff.im != 0.0).map(|t| 2.0 + t.power));
    p
}

fn continued_with(cont: &Continuation, rule: &Rule, s: C) -> (C, f64) {
    let one_s = 1.0 - s;
    let mut up = C::new(0.0, 0.0);
    let mut lo = C::new(0.0, 0.0);
    let mut mag = 0.0;
    for n in &rule.ray {
        let k = (one_s * n.x.ln()).exp() * n.w;
        up += k * n.v;
        lo += k * n.v.conj();
        mag += k.norm() * n.v.norm();
    }
    let ln_r0 = cont.r0.ln();
    let mut semi = C::new(0.0, 0.0);
    for n in &rule.semi {
        let ln_l = C::new(ln_r0, n.x);
        let t = ((2.0 - s) * ln_l).exp() * n.v * n.w;
        semi += t;
        mag += t.norm();
    }
    let ph = (C::new(0.0, 0.5 * PI) * one_s).exp();
    let phm = (C::new(0.0, -0.5 * PI) * one_s).exp();
    let mut total = ph * up + phm * lo + semi;
    for t in &cont.series {
        let a = added_back(t, s);
        total += a;
        mag += a.norm();
    }
    let pre = 1.0 / (2.0 * PI * (s - 1.0));
    (total * pre, mag * pre.norm())
}

/// ζ₊(s) continued to Re s > strip_bound(ext, g, N).
pub fn zeta_plus_continued(ext: &Extension, g: f64, s: C, cfg: &ContinuationConfig) -> Result<ZetaEvaluation> {
    cfg.validate()?;
    Coupling::new(g)?;
    let strip = strip_bound(ext, g, cfg.order);
    if !(s.re > strip) || !s.im.is_finite() {
        return Err(Error::OutOfStrip { s: s.to_string(), bound: strip });
    }
    let cont = continuation(ext, g, cfg)?;
    for p in pole_candidates(&cont) {
        let d = (s - p).norm();
        if d < POLE_EXCLUSION {
            return Err(Error::PoleProximity { s: s.to_string(), pole: p, distance: d });
        }
    }
    let (va, _) = continued_with(&cont, &cont.rules[0], s);
    let (vb, mag) = continued_with(&cont, &cont.rules[1], s);
    let quad = (va - vb).norm();
    // first omitted terms over [mu_max, ∞) on both rays
    let pre = 1.0 / (2.0 * PI * (s - 1.0)).norm();
    let tail: f64 = cont
        .omitted
        .iter()
        .map(|t| {
            let e = t.power;
            2.0 * pre * t.coeff.norm() * cfg.mu_max.powf(2.0 - s.re + e) / (s - 2.0 - e).norm()
                * (0.5 * PI * s.im.abs()).exp()
        })
        .sum();
    let err = quad + tail + 8.0 * f64::EPSILON * mag;
    if quad > cfg.quad_tol * vb.norm().max(1.0) {
        return Err(Error::Tolerance(format!("quadrature estimate {quad:e} at s = {s}")));
    }
    debug_assert!(cont.strip == strip);
    Ok(ZetaEvaluation {
        s,
        value: vb,
        method: Method::Continuation,
        error_estimate: err,
        strip_bound: strip,
        zero_mode_excluded: ext.is_neumann(),
    })
}

pub fn zeta_plus(ext: &Extension, g: f64, s: C, cfg: &ContinuationConfig, method: Method) -> Result<ZetaEvaluation> {
    match method {
        Method::Sum => zeta_plus_sum(ext, g, s, cfg.n_eigs),
        Method::Continuation => zeta_plus_continued(ext, g, s, cfg),
    }
}

/// e^{−iπs}, exact at integers.
fn negative_phase(s: C) -> C {
    if s.im == 0.0 && s.re.fract() == 0.0 && s.re.abs() < 1e15 {
        let odd = (s.re as i64).rem_euclid(2) == 1;
        return C::new(if odd { -1.0 } else { 1.0 }, 0.0);
    }
    (C::new(0.0, -PI) * s).exp()
}

/// ζ(s) = ζ₊^{(α,β)}(s) + e^{−iπs} ζ₊^{(α,−β)}(s).
pub fn zeta_full(ext: &Extension, g: f64, s: C, cfg: &ContinuationConfig, method: Method) -> Result<ZetaEvaluation> {
    let p = zeta_plus(ext, g, s, cfg, method)?;
    let m = zeta_plus(&ext.flipped(), g, s, cfg, method)?;
    let ph = negative_phase(s);
    Ok(ZetaEvaluation {
        value: p.value + ph * m.value,
        error_estimate: p.error_estimate + ph.norm() * m.error_estimate,
        strip_bound: p.strip_bound.max(m.strip_bound),
        ..p
    })
}

/// η(s) = ζ₊^{(α,β)}(s) − ζ₊^{(α,−β)}(s).
pub fn eta(ext: &Extension, g: f64, s: C, cfg: &ContinuationConfig, method: Method) -> Result<ZetaEvaluation> {
    let p = zeta_plus(ext, g, s, cfg, method)?;
    let m = zeta_plus(&ext.flipped(), g, s, cfg, method)?;
    Ok(ZetaEvaluation {
        value: p.value - m.value,
        error_estimate: p.error_estimate + m.error_estimate,
        strip_bound: p.strip_bound.max(m.strip_bound),
        ..p
    })
}

// ---------------------------------------------------------------------------
// Pole tables

/// Poles of ζ₊ shared by every extension: s = 1 with residue 1/π and
/// s = 2−k with residue Re{i A_k(g,1)}/((k−1)π), k = 2..K.
pub fn poles_d(g: f64, k_max: usize) -> Result<PoleTable> {
    Coupling::new(g)?;
    if !(2..=K_MAX).contains(&k_max) {
        return Err(Error::Config(format!("K must lie in [2, {K_MAX}]")));
    }
    let mut e = vec![PoleEntry { location: 1.0, residue: C::new(1.0 / PI, 0.0), source: PoleSource::One, k: 0 }];
    for k in 2..=k_max {
        let a = a_coefficient(g, 1.0, k)?;
        let r = if k % 2 == 0 { 0.0 } else { (C::i() * a).re / ((k - 1) as f64 * PI) };
        e.push(PoleEntry { location: 2.0 - k as f64, residue: C::new(r, 0.0), source: PoleSource::DSeries, k });
    }
    Ok(PoleTable::finish(e))
}

/// Location of the k-th anomalous pole: 2gk for g < 0, −2gk for g > 0.
pub fn anomalous_location(g: f64, k: usize) -> f64 {
    -2.0 * g.abs() * k as f64
}

/// Residue of ζ₊ at the k-th anomalous pole for a given ρ:
/// (2g/π) sin(ka)/ρ^k for g < 0 and (2g/π) ρ^k sin(ka) for g > 0,
/// a = π(1/2−g).
pub fn anomalous_residue(g: f64, rho: f64, k: usize) -> f64 {
    -anomalous_residue_displayed(g, rho, k)
}

/// The same quantity with the opposite overall sign:
/// −(2g/π) sin(ka)/ρ^k for g < 0 and −(2g/π) ρ^k sin(ka) for g > 0.
pub fn anomalous_residue_displayed(g: f64, rho: f64, k: usize) -> f64 {
    let kf = k as f64;
    let s = (kf * PI * (0.5 - g)).sin();
    if g < 0.0 {
        -(2.0 * g / PI) * s / rho.powi(k as i32)
    } else {
        -(2.0 * g / PI) * rho.powi(k as i32) * s
    }
}

fn anomalous_table(ext: &Extension, g: f64, k_max: usize, f: fn(f64, f64, usize) -> f64) -> Result<PoleTable> {
    let cg = Coupling::new(g)?;
    if ext.is_dirichlet() || ext.is_neumann() || g == 0.0 {
        return Ok(PoleTable::default());
    }
    let r = rho(ext, cg)?;
    let e = (1..=k_max)
        .map(|k| PoleEntry {
            location: anomalous_location(g, k),
            residue: C::new(f(g, r, k), 0.0),
            source: PoleSource::Anomalous,
            k,
        })
        .collect();
    Ok(PoleTable::finish(e))
}

/// Anomalous poles of ζ₊ at s = −2|g|k, k = 1..K. Empty for the limiting
/// extensions and for g = 0.
pub fn poles_anomalous(ext: &Extension, g: f64, k_max: usize) -> Result<PoleTable> {
    anomalous_table(ext, g, k_max, anomalous_residue)
}

/// [`poles_anomalous`] with [`anomalous_residue_displayed`] values.
pub fn poles_anomalous_displayed(ext: &Extension, g: f64, k_max: usize) -> Result<PoleTable> {
    anomalous_table(ext, g, k_max, anomalous_residue_displayed)
}

/// All poles of ζ₊ with D-series order and anomalous order K.
pub fn poles_plus(ext: &Extension, g: f64, k_max: usize) -> Result<PoleTable> {
    let mut e = poles_d(g, k_max)?.entries;
    e.extend(poles_anomalous(ext, g, k_max)?.entries);
    Ok(PoleTable::finish(e))
}

/// [`poles_plus`] with the anomalous part from [`poles_anomalous_displayed`].
pub fn poles_plus_displayed(ext: &Extension, g: f64, k_max: usize) -> Result<PoleTable> {
    let mut e = poles_d(g, k_max)?.entries;
    e.extend(poles_anomalous_displayed(ext, g, k_max)?.entries);
    Ok(PoleTable::finish(e))
}

fn combine(ext: &Extension, g: f64, k_max: usize, f: impl Fn(&PoleEntry, C) -> C) -> Result<PoleTable> {
    let p = poles_plus(ext, g, k_max)?;
    let m = poles_plus(&ext.flipped(), g, k_max)?;
    let e = p
        .entries
        .iter()
        .map(|e| {
            let other = m.find(e.source, e.k).map(|o| o.residue).unwrap_or_default();
            PoleEntry { residue: f(e, other), ..*e }
        })
        .collect();
    Ok(PoleTable::finish(e))
}

/// Poles of ζ: Res ζ₊^{(α,β)} + e^{−iπs₀} Res ζ₊^{(α,−β)} at each s₀.
pub fn zeta_full_poles(ext: &Extension, g: f64, k_max: usize) -> Result<PoleTable> {
    combine(ext, g, k_max, |e, other| e.residue + negative_phase(C::new(e.location, 0.0)) * other)
}

/// Poles of η: Res ζ₊^{(α,β)} − Res ζ₊^{(α,−β)}.
pub fn eta_poles(ext: &Extension, g: f64, k_max: usize) -> Result<PoleTable> {
    combine(ext, g, k_max, |e, other| e.residue - other)
}

// ---------------------------------------------------------------------------
// Residue extraction

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueEstimate {
    pub value: C,
    /// |64-node − 128-node| difference.
    pub error: f64,
}

/// (1/2πi) ∮ f ds on |s − s₀| = radius by the 64-node trapezoidal rule,
/// checked against 128 nodes.
pub fn residue_extract<F>(mut f: F, s0: C, radius: f64) -> Result<ResidueEstimate>
where
    F: FnMut(C) -> Result<C>,
{
    if !(radius > 0.0) {
        return Err(Error::Config("radius must be positive".into()));
    }
    let n = 128;
    let mut even = C::new(0.0, 0.0);
    let mut odd = C::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for j in 0..n {
        let u = C::from_polar(radius, 2.0 * PI * j as f64 / n as f64);
        let v = f(s0 + u)? * u;
        scale = scale.max(v.norm());
        if j % 2 == 0 {
            even += v;
        } else {
            odd += v;
        }
    }
    let r64 = even / (n / 2) as f64;
    let r128 = (even + odd) / n as f64;
    let error = (r64 - r128).norm();
    if error > 1e-6 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Nonconvergence(format!("residue at {s0}: doubling changed the value by {error:e}")));
    }
    Ok(ResidueEstimate { value: r64, error })
}

/// Residue of ζ₊ at s₀ by contour integration of the continuation.
pub fn contour_residue_plus(
    ext: &Extension,
    g: f64,
    s0: f64,
    radius: f64,
    cfg: &ContinuationConfig,
) -> Result<ResidueEstimate> {
    residue_extract(|s| Ok(zeta_plus_continued(ext, g, s, cfg)?.value), C::new(s0, 0.0), radius)
}

// ---------------------------------------------------------------------------
// Scaling

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub g: f64,
    pub k: usize,
    pub c: f64,
    pub location: f64,
    pub rho: f64,
    /// ρ(α′,β′) with α′ = c^{−g}α, β′ = c^{g}β.
    pub rho_scaled: f64,
    /// Residue of the ζ₊ of the scaled problem on (0, 1/c).
    pub scaled_residue: f64,
    /// c^{2|g|k} times the residue of ζ₊ on (0,1).
    pub expected: f64,
    pub formula_rel_err: f64,
    /// max_n |μ_n − cλ_n|/(cλ_n) over the first `n_roots` eigenvalues.
    pub eigenvalue_rel_err: f64,
    pub n_roots: usize,
}

/// H_L(μ) = μ^{2g} J_{1/2−g}(μL) − ρ′ J_{g−1/2}(μL): eigenvalue condition on
/// (0, L) for an extension with constant ρ′.
fn scaled_secular(g: f64, rho_p: f64, l: f64, mu: f64) -> f64 {
    mu.powf(2.0 * g) * bessel_j_and_prime(0.5 - g, mu * l).0 - rho_p * bessel_j_and_prime(g - 0.5, mu * l).0
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Eigenvalues on (0, L) by sign changes of H_L between the zeros of
/// J_{g−1/2}(μL).
fn scaled_eigenvalues(g: f64, rho_p: f64, l: f64, n: usize) -> Result<Vec<f64>> {
    let z: Vec<f64> = bessel_zeros(g - 0.5, n + 1)?.into_iter().map(|j| j / l).collect();
    let f = |mu: f64| scaled_secular(g, rho_p, l, mu);
    let mut out = Vec::with_capacity(n);
    let lo = 1e-9 * z[0];
    if (f(lo) > 0.0) != (f(z[0]) > 0.0) {
        out.push(bisect(f, lo, z[0]));
    }
    for w in z.windows(2) {
        if out.len() == n {
            break;
        }
        out.push(bisect(f, w[0], w[1]));
    }
    Ok(out)
}

/// Residue identity under x ↦ cx and the eigenvalue map λ_n ↦ cλ_n.
pub fn scaling_covariance(ext: &Extension, g: f64, c: f64, k: usize) -> Result<ScalingReport> {
    let cg = Coupling::new(g)?;
    if ext.is_dirichlet() || ext.is_neumann() || g == 0.0 {
        return Err(Error::Domain("the scaling identity concerns anomalous poles: α, β, g nonzero".into()));
    }
    if !(c > 0.0 && c.is_finite()) || k == 0 {
        return Err(Error::Config("c must be positive and k ≥ 1".into()));
    }
    let r = rho(ext, cg)?;
    let scaled = Extension::new(c.powf(-g) * ext.alpha(), c.powf(g) * ext.beta())?;
    let rp = rho(&scaled, cg)?;
    let l = 1.0 / c;
    let s0 = anomalous_location(g, k);
    // on (0, L) with ρ′ the eigenvalues are those on (0,1) with ρ′L^{2g},
    // divided by L, so that ζ̇₊(s) = L^s ζ₊(s; ρ′L^{2g})
    let scaled_residue = l.powf(s0) * anomalous_residue(g, rp * l.powf(2.0 * g), k);
    let expected = c.powf(2.0 * g.abs() * k as f64) * anomalous_residue(g, r, k);
    let formula_rel_err = (scaled_residue - expected).abs() / expected.abs();

    let n_roots = 10;
    let base = positive_eigenvalues(ext, cg, n_roots)?.positive;
    let mu = scaled_eigenvalues(g, rp, l, n_roots)?;
    if mu.len() != base.len() {
        return Err(Error::Structural(format!("{} scaled roots for {} eigenvalues", mu.len(), base.len())));
    }
    let eigenvalue_rel_err = mu.iter().zip(&base).map(|(m, b)| (m - c * b).abs() / (c * b)).fold(0.0, f64::max);
    Ok(ScalingReport {
        g,
        k,
        c,
        location: s0,
        rho: r,
        rho_scaled: rp,
        scaled_residue,
        expected,
        formula_rel_err,
        eigenvalue_rel_err,
        n_roots,
    })
}
