//! Property tests for structural invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use spectral_core::asymptotics::{series_tau, series_trace_dgd, series_trace_diff, series_trace_g2};
use spectral_core::operator_model::{
    eigenvalue_between_zeros, negative_eigenvalues, positive_eigenvalues, rho, secular_f, Coupling, Extension,
};
use spectral_core::resolvent::{homogeneous_solutions, tau, wronskian_at, wronskians};
use spectral_core::second_order::{script_f, second_order_eigenvalues};
use spectral_core::special_functions::{bessel_j_hankel, bessel_j_series, bessel_zeros, hankel_symbol};
use spectral_core::spectral_zeta::{eta, poles_plus, ContinuationConfig, Method};

type C = Complex64;

fn cg(g: f64) -> Coupling {
    Coupling::new(g).unwrap()
}

/// Couplings away from 0, where the general extension has no special form.
fn coupling() -> impl Strategy<Value = f64> {
    prop_oneof![-0.45..-0.05f64, 0.05..0.45f64]
}

fn general_extension() -> impl Strategy<Value = Extension> {
    (0.0..std::f64::consts::PI).prop_filter_map("limiting", |t: f64| {
        let (a, b) = (t.cos(), t.sin());
        (a.abs() > 0.05 && b.abs() > 0.05).then(|| Extension::new(a, b).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hankel_symbol_parity(nu in -1.4..1.4f64, k in 0usize..12) {
        prop_assert_eq!(hankel_symbol(nu, k), hankel_symbol(-nu, k));
    }

    #[test]
    fn series_and_hankel_agree_in_overlap(nu in -0.99..1.4f64, z in 10.0..14.0f64) {
        let (h, rem) = bessel_j_hankel(nu, z);
        let d = (bessel_j_series(nu, z) - h).abs();
        prop_assert!(d <= 1e-11, "ν={nu} z={z}: {d:e} (Hankel remainder {rem:e})");
    }

    #[test]
    fn wronskians_are_constant(g in -0.45..0.45f64, lam in 0.5..20.0f64, t in 0.1..0.9f64) {
        let l = C::new(lam, 0.0);
        let w = wronskians(g, l).unwrap().values;
        let s = homogeneous_solutions(g, l * t, l).unwrap();
        let got = [
            wronskian_at(s.l1d, s.r1),
            wronskian_at(s.l2d, s.r2),
            wronskian_at(s.l1n, s.r1),
            wronskian_at(s.l2n, s.r2),
        ];
        for (a, b) in got.iter().zip(w) {
            prop_assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()), "{a} {b}");
        }
    }

    #[test]
    fn one_eigenvalue_per_interval(g in coupling(), e in general_extension()) {
        let s = positive_eigenvalues(&e, cg(g), 40).unwrap();
        let z = bessel_zeros(g - 0.5, 41).unwrap();
        let off = usize::from(s.first_interval_root);
        for (n, v) in s.positive.iter().enumerate() {
            let (lo, hi) = if n < off { (0.0, z[0]) } else { (z[n - off], z[n - off + 1]) };
            prop_assert!(*v > lo && *v < hi, "n={n}: {v} not in ({lo}, {hi})");
        }
    }

    #[test]
    fn roots_solve_secular_equation_and_are_poles_of_tau(g in coupling(), e in general_extension()) {
        let r = rho(&e, cg(g)).unwrap();
        let s = positive_eigenvalues(&e, cg(g), 10).unwrap();
        for v in &s.positive {
            let f = secular_f(*v, cg(g)).unwrap();
            prop_assert!((f - r).abs() <= 1e-9 * r.abs(), "F({v}) = {f}, ρ = {r}");
            // τ blows up at the eigenvalue
            match tau(C::new(*v, 0.0), &e, g) {
                Ok(t) => prop_assert!(t.norm() > 1e6, "τ({v}) = {t}"),
                Err(err) => prop_assert_eq!(err.exit_code(), 3),
            }
        }
    }

    #[test]
    fn eigenvalues_move_monotonically_with_rho(g in coupling(), r in prop_oneof![-5.0..-0.2f64, 0.2..5.0f64], k in 1usize..20) {
        let z = bessel_zeros(g - 0.5, k + 1).unwrap();
        let h = 1e-3;
        let l0 = eigenvalue_between_zeros(g, r, z[k - 1], z[k]).unwrap();
        let lm = eigenvalue_between_zeros(g, r - h, z[k - 1], z[k]).unwrap();
        let lp = eigenvalue_between_zeros(g, r + h, z[k - 1], z[k]).unwrap();
        // dλ/dρ = 1/F'(λ)
        let d = 1e-6 * l0;
        let fp = secular_f(l0 + d, cg(g)).unwrap() - secular_f(l0 - d, cg(g)).unwrap();
        prop_assert!((lp - l0) * fp > 0.0 && (l0 - lm) * fp > 0.0, "{lm} {l0} {lp} F' sign {fp}");
    }

    #[test]
    fn limiting_spectra_ignore_the_sign_of_beta(g in -0.45..0.45f64) {
        for e in [Extension::dirichlet(), Extension::neumann()] {
            let p = positive_eigenvalues(&e, cg(g), 20).unwrap();
            let n = negative_eigenvalues(&e, cg(g), 20).unwrap();
            prop_assert_eq!(&p.positive, &n.positive);
        }
    }

    #[test]
    fn lower_branch_series_are_conjugates(g in coupling(), e in general_extension(), k in 1usize..8) {
        let pairs = [
            (series_trace_dgd(g, 1.0, k).unwrap(), series_trace_dgd(g, -1.0, k).unwrap()),
            (series_tau(g, &e, 1.0, k).unwrap(), series_tau(g, &e, -1.0, k).unwrap()),
            (series_trace_g2(g, &e, 1.0, k).unwrap(), series_trace_g2(g, &e, -1.0, k).unwrap()),
        ];
        for (up, lo) in pairs {
            prop_assert_eq!(up.terms.len(), lo.terms.len());
            for (a, b) in up.terms.iter().zip(&lo.terms) {
                prop_assert_eq!(a.exponent, b.exponent);
                prop_assert!((a.coeff.conj() - b.coeff).norm() <= 1e-14 * (1.0 + a.coeff.norm()));
            }
        }
        prop_assert_eq!(series_trace_diff(g, 1.0).terms.len(), 1);
    }

    #[test]
    fn close_poles_are_reported_as_collisions(g in -0.45..0.45f64, e in general_extension()) {
        prop_assume!(g != 0.0);
        let t = poles_plus(&e, g, 8).unwrap();
        for (i, a) in t.entries.iter().enumerate() {
            for b in &t.entries[i + 1..] {
                if (a.location - b.location).abs() < 1e-6 && a.source != b.source {
                    let listed = t.collisions.iter().any(|&(x, y)| {
                        (x == a.location && y == b.location) || (x == b.location && y == a.location)
                    });
                    prop_assert!(listed, "{} and {} not listed", a.location, b.location);
                }
            }
        }
    }

    #[test]
    fn script_f_is_f_over_mu(g in -0.45..0.45f64, mu in 0.1..30.0f64) {
        match (script_f(mu, cg(g)), secular_f(mu, cg(g))) {
            (Ok(a), Ok(f)) => prop_assert!((a - f / mu).abs() <= 1e-12 * (1.0 + a.abs())),
            (a, f) => prop_assert!(a.is_err() && f.is_err()),
        }
    }

    #[test]
    fn second_order_limits_are_first_order_zeros(g in -0.45..0.45f64) {
        for e in [Extension::dirichlet(), Extension::neumann()] {
            let s = second_order_eigenvalues(&e, cg(g), 15).unwrap();
            let p = positive_eigenvalues(&e, cg(g), 15).unwrap();
            for (m, l) in s.mu.iter().zip(&p.positive) {
                prop_assert!((m - l).abs() <= 1e-13 * l);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn eta_vanishes_for_limiting_extensions(g in -0.45..0.45f64, re in -2.5..2.5f64, im in -2.0..2.0f64) {
        let s = C::new(re, im);
        prop_assume!((s - 1.0).norm() > 0.05);
        let cfg = ContinuationConfig::default();
        for e in [Extension::dirichlet(), Extension::neumann()] {
            match eta(&e, g, s, &cfg, Method::Continuation) {
                Ok(v) => prop_assert!(v.value.norm() <= 1e-10, "η({s}) = {}", v.value),
                // only proximity to a pole may refuse the evaluation
                Err(err) => prop_assert_eq!(err.exit_code(), 2, "{}", err),
            }
        }
    }
}
