//! Acceptance suite: each criterion runs its checks and reports one line
//! per check. Shared by the `acceptance` test target and `verify`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotics::{a_coefficient, Exponent, fit_inverse_powers, series_tau, series_trace_diff};
use crate::dd::DD;
use crate::error::Result;
use crate::operator_model::{positive_eigenvalues, rho, secular_h, Coupling, Extension};
use crate::resolvent::{ray_values, trace_diff, trace_dgd, traces_by_quadrature, Which};
use crate::second_order::{resolvent_relation_check, second_order_eigenvalues};
use crate::special_functions::{bessel_j_hankel, bessel_j_series, bessel_zero, bessel_zeros};
use crate::spectral_zeta::{
    anomalous_residue_displayed, contour_residue_plus, eta, eta_poles, poles_anomalous, poles_d, residue_extract,
    scaling_covariance, zeta_full, zeta_plus_continued, zeta_plus_sum, ContinuationConfig, Method, PoleSource,
};

type C = Complex64;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    /// Criterion number and sub-label, e.g. "6c".
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {} ({}; {:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.description,
            self.detail,
            self.seconds
        )
    }
}

struct Out {
    checks: Vec<Check>,
    start: Instant,
}

impl Out {
    fn new() -> Out {
        Out { checks: Vec::new(), start: Instant::now() }
    }

    fn push(&mut self, id: &str, description: &str, passed: bool, detail: String) {
        let seconds = self.start.elapsed().as_secs_f64();
        self.start = Instant::now();
        self.checks.push(Check { id: id.into(), description: description.into(), passed, detail, seconds });
    }

    /// Records an error as a failed check.
    fn push_result(&mut self, id: &str, description: &str, r: Result<(bool, String)>) {
        match r {
            Ok((p, d)) => self.push(id, description, p, d),
            Err(e) => self.push(id, description, false, format!("error: {e}")),
        }
    }
}

fn cg(g: f64) -> Coupling {
    Coupling::new(g).expect("coupling in range")
}

fn diag() -> Extension {
    Extension::new(1.0, 1.0).expect("unit vector")
}

fn ext_grid() -> Vec<Extension> {
    vec![
        Extension::dirichlet(),
        Extension::neumann(),
        Extension::new(1.0, 1.0).expect("unit vector"),
        Extension::new(1.0, -1.0).expect("unit vector"),
        Extension::new(2.0, 1.0).expect("unit vector"),
    ]
}

pub fn criterion_1() -> Vec<Check> {
    let mut o = Out::new();
    let r = (|| {
        let mut worst: f64 = 0.0;
        for n in 1..=100 {
            worst = worst.max((bessel_zero(0.5, n)? - n as f64 * PI).abs());
            worst = worst.max((bessel_zero(-0.5, n)? - (n as f64 - 0.5) * PI).abs());
        }
        Ok((worst <= 1e-12, format!("max error {worst:.2e}, tol 1e-12")))
    })();
    o.push_result("1a", "zeros of J_{±1/2}, n ≤ 100", r);
    let mut worst: f64 = 0.0;
    for nu in [-0.99, -0.49, -0.2, 0.0, 0.2, 0.49, 0.99, 1.3] {
        for i in 0..=40 {
            let z = 10.0 + 4.0 * i as f64 / 40.0;
            worst = worst.max((bessel_j_series(nu, z) - bessel_j_hankel(nu, z).0).abs());
        }
    }
    o.push("1b", "series/Hankel agreement on z ∈ [10,14]", worst <= 1e-11, format!("max |Δ| {worst:.2e}, tol 1e-11"));
    let total: f64 = o.checks.iter().map(|c| c.seconds).sum();
    o.push("1c", "Bessel engine runtime", total < 5.0, format!("{total:.2}s, limit 5s"));
    o.checks
}

pub fn criterion_2() -> Vec<Check> {
    let mut o = Out::new();
    let r = (|| {
        let s = positive_eigenvalues(&Extension::dirichlet(), cg(0.3), 100)?;
        let mut worst: f64 = 0.0;
        for (n, v) in s.positive.iter().enumerate() {
            worst = worst.max((v - bessel_zero(-0.2, n + 1)?).abs());
        }
        Ok((worst <= 1e-12, format!("max error {worst:.2e}, tol 1e-12")))
    })();
    o.push_result("2a", "g=0.3, α=0: eigenvalues are zeros of J_{-0.2}", r);
    for g in [-0.3, 0.3] {
        let r = (|| {
            let e = diag();
            let s = positive_eigenvalues(&e, cg(g), 1000)?;
            let r = rho(&e, cg(g))?;
            let z = bessel_zeros(g - 0.5, 1001)?;
            let off = usize::from(s.first_interval_root);
            let mut ok = s.positive.len() == 1000 && s.first_interval_root == (r > 0.0);
            for (n, v) in s.positive.iter().enumerate() {
                let (lo, hi) = if n < off { (0.0, z[0]) } else { (z[n - off], z[n - off + 1]) };
                ok &= *v > lo && *v < hi;
                let (a, b) = s.brackets[n];
                let (ha, hb) = (secular_h(g, r, a.max(1e-3 * z[0])), secular_h(g, r, b));
                ok &= (ha > 0.0) != (hb > 0.0) && a <= *v && *v <= b;
            }
            Ok((ok, format!("{} eigenvalues, one per interval, sign change certified", s.positive.len())))
        })();
        o.push_result(&format!("2b{}", if g < 0.0 { "-" } else { "+" }), &format!("interlacing, (1,1)/√2, g={g}"), r);
    }
    let total: f64 = o.checks.iter().map(|c| c.seconds).sum();
    o.push("2c", "spectrum runtime", total < 10.0, format!("{total:.2}s, limit 10s"));
    o.checks
}

pub fn criterion_3() -> Vec<Check> {
    let mut o = Out::new();
    let r = (|| {
        let mut worst: f64 = 0.0;
        for g in [-0.3, -0.1, 0.1, 0.3, 1.0 / 3.0] {
            for l in [C::new(2.0, 0.0), C::new(0.0, 5.0), C::new(3.0, 4.0)] {
                let (qd, qdiff) = traces_by_quadrature(l, g)?;
                let a = trace_dgd(l, g)?;
                let b = trace_diff(l, g)?;
                worst = worst.max((a - qd).norm() / a.norm()).max((b - qdiff).norm() / b.norm());
            }
        }
        Ok((worst <= 1e-8, format!("max relative error {worst:.2e}, tol 1e-8")))
    })();
    o.push_result("3a", "closed-form traces vs kernel quadrature", r);
    let t = o.checks[0].seconds;
    o.push("3b", "trace runtime", t < 30.0, format!("{t:.2}s, limit 30s"));
    o.checks
}

pub fn criterion_4() -> Vec<Check> {
    let mut o = Out::new();
    let r = (|| {
        let mut worst: f64 = 0.0;
        for g in [0.2, -0.3] {
            let samples: Vec<(f64, DD)> = (0..40)
                .map(|i| {
                    let mu = 1e2 * 100f64.powf(i as f64 / 39.0);
                    (mu, ray_values(mu, g).dgd)
                })
                .collect();
            let c = fit_inverse_powers(&samples, 2, 10);
            for k in 2..=5 {
                // A_k (iμ)^{−k} = c_k μ^{−k}
                let fitted = C::new(0.0, 1.0).powi(k as i32) * c[k - 2].to_f64();
                let a = a_coefficient(g, 1.0, k)?;
                worst = worst.max((fitted - a).norm() / a.norm());
            }
        }
        Ok((worst <= 1e-6, format!("max relative error {worst:.2e}, tol 1e-6")))
    })();
    o.push_result("4a", "A₂..A₅ by remainder fitting on μ ∈ [1e2,1e4]", r);
    let mut ok = true;
    let mut detail = String::new();
    for g in [0.2, -0.3] {
        // only the 2g/λ term survives; on λ = iμ the series reads −i c/μ
        let c = series_trace_diff(g, 1.0).coeff(Exponent::int(-1)).re;
        let rem: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
            .iter()
            .map(|&mu: &f64| (ray_values(mu, g).d - DD::new(c) / DD::new(mu)).abs().to_f64() * mu.powi(6))
            .collect();
        ok &= rem[2] < rem[1] && rem[1] < rem[0] && rem[3] < 1e-12;
        detail += &format!("g={g}: μ⁶|R| at μ=5..40 = {:.1e}, {:.1e}, {:.1e}, {:.1e}; ", rem[0], rem[1], rem[2], rem[3]);
    }
    o.push("4b", "Tr(G_D−G_N) remainder decays faster than μ^{-6}", ok, detail.trim_end_matches("; ").into());
    let total: f64 = o.checks.iter().map(|c| c.seconds).sum();
    o.push("4c", "asymptotics runtime", total < 60.0, format!("{total:.2}s, limit 60s"));
    o.checks
}

pub fn criterion_5() -> Vec<Check> {
    let mut o = Out::new();
    let cfg = ContinuationConfig::default();
    let r = (|| {
        let mut worst: f64 = 0.0;
        let mut n = 0;
        for g in [-0.3, -0.1, 0.1, 0.3, -1.0 / 3.0] {
            for e in ext_grid() {
                for s in [1.2, 1.5, 2.0, 3.0] {
                    let s = C::new(s, 0.0);
                    let a = zeta_plus_sum(&e, g, s, cfg.n_eigs)?;
                    let b = zeta_plus_continued(&e, g, s, &cfg)?;
                    worst = worst.max((a.value - b.value).norm());
                    n += 1;
                }
            }
        }
        Ok((worst <= 1e-7, format!("{n} points, max |sum − continued| {worst:.2e}, tol 1e-7")))
    })();
    o.push_result("5a", "ζ₊ direct sum vs continuation", r);
    let t = o.checks[0].seconds;
    o.push("5b", "cross-method runtime", t < 300.0, format!("{t:.1}s, limit 300s"));
    o.checks
}

pub fn criterion_6() -> Vec<Check> {
    let mut o = Out::new();
    let cfg = ContinuationConfig::default();
    let r = (|| {
        let mut worst: f64 = 0.0;
        for g in [-1.0 / 3.0, 0.3] {
            for e in ext_grid() {
                let r = contour_residue_plus(&e, g, 1.0, 0.02, &cfg)?;
                worst = worst.max((r.value - 1.0 / PI).norm());
            }
        }
        Ok((worst <= 1e-6, format!("max |Res − 1/π| {worst:.2e}, tol 1e-6")))
    })();
    o.push_result("6a", "Res ζ₊ at s=1 is 1/π for every extension", r);

    let r = (|| {
        let g = 0.3;
        let want = (C::i() * a_coefficient(g, 1.0, 3)?).re / (2.0 * PI);
        let r = contour_residue_plus(&Extension::dirichlet(), g, -1.0, 0.02, &cfg)?;
        let table = poles_d(g, 3)?.find(PoleSource::DSeries, 3).map(|p| p.residue.re).unwrap_or(f64::NAN);
        let err = (r.value - want).norm();
        Ok((err <= 1e-6 && table == want, format!("contour {:.12}, Re{{iA₃}}/2π {want:.12}, tol 1e-6", r.value.re)))
    })();
    o.push_result("6b", "D-extension residue at s=−1, g=0.3", r);

    let (g, e) = (-1.0 / 3.0, diag());
    let contour: Result<Vec<(f64, C)>> = (1..=2)
        .map(|k| {
            let s0 = 2.0 * g * k as f64;
            Ok((s0, contour_residue_plus(&e, g, s0, 0.02, &cfg)?.value))
        })
        .collect();
    let r = contour.clone().and_then(|c| {
        let r0 = rho(&e, cg(g))?;
        let mut worst: f64 = 0.0;
        let mut detail = String::new();
        for (k, (s0, v)) in c.iter().enumerate() {
            let want = anomalous_residue_displayed(g, r0, k + 1);
            worst = worst.max((v - want).norm());
            detail += &format!("s={s0:.4}: contour {:.9}, formula {want:.9}; ", v.re);
        }
        Ok((worst <= 1e-5, format!("{}max error {worst:.2e}, tol 1e-5", detail)))
    });
    o.push_result("6c", "anomalous residues at s=2g,4g vs the displayed formula, g=−1/3, (1,1)/√2", r);
    let r = contour.and_then(|c| {
        let t = poles_anomalous(&e, g, 2)?;
        let mut worst: f64 = 0.0;
        for (k, (_, v)) in c.iter().enumerate() {
            let want = t.find(PoleSource::Anomalous, k + 1).map(|p| p.residue).unwrap_or_default();
            worst = worst.max((v - want).norm());
        }
        Ok((worst <= 1e-5, format!("max error {worst:.2e}, tol 1e-5")))
    });
    o.push_result("6c*", "anomalous residues at s=2g,4g vs the sign-corrected table", r);

    let r = (|| {
        let t = eta_poles(&e, g, 6)?;
        let mut worst: f64 = 0.0;
        for k in [2, 4, 6] {
            worst = worst.max(t.find(PoleSource::Anomalous, k).map(|p| p.residue.norm()).unwrap_or(f64::INFINITY));
        }
        let c = residue_extract(|s| Ok(eta(&e, g, s, &cfg, Method::Continuation)?.value), C::new(4.0 * g, 0.0), 0.02)?;
        worst = worst.max(c.value.norm());
        Ok((worst <= 1e-10, format!("table k=2,4,6 and contour at s=4g: max {worst:.2e}, tol 1e-10")))
    })();
    o.push_result("6d", "even-k η residues vanish", r);
    o.checks
}

pub fn criterion_7() -> Vec<Check> {
    let mut o = Out::new();
    let cfg = ContinuationConfig::default();
    let r = (|| {
        let mut worst: f64 = 0.0;
        for e in [Extension::dirichlet(), Extension::neumann()] {
            for g in [-0.3, 0.2] {
                for s in [C::new(-2.5, 0.0), C::new(-0.5, 0.3), C::new(0.5, 0.0), C::new(2.0, 0.0)] {
                    worst = worst.max(eta(&e, g, s, &cfg, Method::Continuation)?.value.norm());
                }
                worst = worst.max(eta(&e, g, C::new(2.0, 0.0), &cfg, Method::Sum)?.value.norm());
            }
        }
        Ok((worst <= 1e-10, format!("max |η| {worst:.2e}, tol 1e-10")))
    })();
    o.push_result("7a", "η ≡ 0 for (0,1) and (1,0)", r);
    let r = (|| {
        let e = Extension::new(2.0, 1.0)?;
        let empty = poles_anomalous(&e, 0.0, 6)?.entries.is_empty();
        let t = series_tau(0.0, &e, 1.0, 6)?;
        let constant = t.terms.len() == 1 && t.terms[0].power == 0.0;
        let d = poles_d(0.0, 8)?;
        let zeros = d.entries.iter().all(|p| p.source == PoleSource::One || p.residue.norm() == 0.0);
        Ok((empty && constant && zeros, format!("anomalous empty: {empty}, τ constant: {constant}, D-series zero: {zeros}")))
    })();
    o.push_result("7b", "g=0 control", r);
    let r = (|| {
        let mut worst: f64 = 0.0;
        for g in [-0.3, 0.2] {
            for s0 in [1.0, -1.0, -3.0] {
                let d = Extension::dirichlet();
                let c =
                    residue_extract(|s| Ok(zeta_full(&d, g, s, &cfg, Method::Continuation)?.value), C::new(s0, 0.0), 0.02)?;
                worst = worst.max(c.value.norm());
            }
        }
        Ok((worst <= 1e-10, format!("max |Res| {worst:.2e}, tol 1e-10")))
    })();
    o.push_result("7c", "ζᴰ residues vanish at s=1,−1,−3", r);
    o.checks
}

pub fn criterion_8() -> Vec<Check> {
    let mut o = Out::new();
    let r = (|| {
        let (mut f, mut e) = (0.0f64, 0.0f64);
        for c in [0.5, 2.0] {
            for k in 1..=3 {
                let rep = scaling_covariance(&diag(), -1.0 / 3.0, c, k)?;
                f = f.max(rep.formula_rel_err);
                e = e.max(rep.eigenvalue_rel_err);
            }
        }
        Ok((f <= 1e-12 && e <= 1e-12, format!("formula {f:.2e}, root-solve {e:.2e}, tol 1e-12")))
    })();
    o.push_result("8a", "scaling covariance, g=−1/3, c ∈ {1/2,2}, k=1..3", r);
    o.checks
}

pub fn criterion_9() -> Vec<Check> {
    let mut o = Out::new();
    let r = (|| {
        let mut worst: f64 = 0.0;
        let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
        for g in [-0.25, 0.3] {
            for mu in [2.0, 5.5] {
                for w in [Which::D, Which::N] {
                    for x in grid {
                        for y in grid {
                            worst = worst.max(resolvent_relation_check(w, x, y, mu, g)?);
                        }
                    }
                }
            }
        }
        Ok((worst <= 1e-9, format!("max residual {worst:.2e}, tol 1e-9")))
    })();
    o.push_result("9a", "second-order resolvent relation on a 5×5 grid", r);
    let r = (|| {
        let mut worst: f64 = 0.0;
        for g in [-0.25, 0.3] {
            for (e, nu) in [(Extension::dirichlet(), g - 0.5), (Extension::neumann(), 0.5 - g)] {
                let s = second_order_eigenvalues(&e, cg(g), 50)?;
                for (m, z) in s.mu.iter().zip(bessel_zeros(nu, 50)?) {
                    worst = worst.max((m - z).abs() / z);
                }
            }
        }
        Ok((worst <= 1e-13, format!("max relative difference {worst:.2e}")))
    })();
    o.push_result("9b", "limiting second-order roots are first-order zeros", r);
    o.checks
}

/// Criteria in order, as (number, title, runner).
pub fn criteria() -> Vec<(usize, &'static str, fn() -> Vec<Check>)> {
    vec![
        (1, "Bessel engine", criterion_1 as fn() -> Vec<Check>),
        (2, "Spectrum", criterion_2),
        (3, "Trace closed forms", criterion_3),
        (4, "Asymptotic coefficients", criterion_4),
        (5, "ζ cross-method", criterion_5),
        (6, "Residues", criterion_6),
        (7, "Symmetry and controls", criterion_7),
        (8, "Scaling covariance", criterion_8),
        (9, "Second order", criterion_9),
    ]
}

/// Runs every criterion, printing each line as it completes.
pub fn run_all(print: bool) -> Vec<Check> {
    let mut all = Vec::new();
    for (_, _, f) in criteria() {
        for c in f() {
            if print {
                println!("{}", c.line());
            }
            all.push(c);
        }
    }
    all
}
