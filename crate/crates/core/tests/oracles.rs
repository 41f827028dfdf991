//! Reference values from the extended-precision script in `tests/oracles/`,
//! frozen at 20 significant digits.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use spectral_core::asymptotics::a_coefficient;
use spectral_core::cli::{execute, Cli};
use spectral_core::operator_model::{positive_eigenvalues, rho, secular_f, Coupling, Extension};
use spectral_core::resolvent::{boundary_coefficients, homogeneous_solutions, kernel, tau, Which};
use spectral_core::second_order::{direct_kernel, second_order_eigenvalues, second_order_tau, varrho};
use spectral_core::special_functions::{bessel_j, bessel_zero, hankel_pq, hankel_symbol};
use spectral_core::spectral_zeta::zeta_plus_sum;

use clap::Parser;

type C = Complex64;

fn cg(g: f64) -> Coupling {
    Coupling::new(g).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn crel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}

/// The extension with β/α = r.
fn ratio(r: f64) -> Extension {
    Extension::new(1.0, r).unwrap()
}

#[test]
fn bessel_value_and_zero() {
    let j = bessel_j(-1.0 / 6.0, 1.0).unwrap();
    assert!(rel(j, 0.71582901141257784836) < 1e-14, "{j}");
    let z = bessel_zero(-1.0 / 6.0, 1).unwrap();
    assert!(rel(z, 2.1422938868972197026) < 1e-14, "{z}");
}

#[test]
fn hankel_symbols_from_gamma_quotients() {
    assert!(rel(hankel_symbol(1.0 / 3.0, 2), 0.14853395061728395062) < 1e-14);
    assert!(rel(hankel_symbol(0.2, 3), -0.4803435) < 1e-14);
    assert_eq!(hankel_symbol(0.5, 1), 0.0);
}

#[test]
fn hankel_p_q_within_remainder() {
    let r = hankel_pq(1.0 / 3.0, C::new(40.0, 0.0), 8);
    let (p, q) = (0.99997681401870641974, -0.001735518598031736085);
    assert!((r.p.re - p).abs() <= r.remainder + 1e-15, "{} {}", r.p, r.remainder);
    assert!((r.q.re - q).abs() <= r.remainder + 1e-15, "{} {}", r.q, r.remainder);
    assert!(r.remainder < 1e-12);
}

#[test]
fn secular_function_value() {
    let f = secular_f(2.0, cg(1.0 / 3.0)).unwrap();
    assert!(rel(f, 6.8005102074262283841) < 1e-13, "{f}");
}

#[test]
fn eigenvalues_at_figure_parameters() {
    let g = cg(1.0 / 3.0);
    let e = ratio(-9.3194533360031570798);
    assert!(rel(rho(&e, g).unwrap(), 3.0) < 1e-14);
    let s = positive_eigenvalues(&e, g, 3).unwrap();
    let want = [1.7552052175598118764, 4.2087316924179659839, 6.7679541089672926551];
    for (v, w) in s.positive.iter().zip(want) {
        assert!((v - w).abs() < 1e-12, "{v} {w}");
    }
    let s0 = positive_eigenvalues(&ratio(-3.0), cg(0.0), 1).unwrap();
    assert!((s0.positive[0] - 1.2490457723982544258).abs() < 1e-12);
}

#[test]
fn six_homogeneous_solutions() {
    let s = homogeneous_solutions(-1.0 / 6.0, C::new(0.7, 0.0), C::new(3.2, 0.0)).unwrap();
    let want = [
        (s.l1d, 0.40817401582751139904, -0.69837696187817234149),
        (s.l2d, 0.60119267239543153219, 0.5513151283026141448),
        (s.l1n, 0.4272248003143303774, 0.61974777308254864239),
        (s.l2n, 0.72146796363357968463, -0.25544671373490664297),
        (s.r1, -0.21149448488291361677, -0.20661836252500645981),
        (s.r2, -0.25697419225903351142, 0.15031015339266754262),
    ];
    for (i, (sol, v, d)) in want.iter().enumerate() {
        assert!(crel(sol.value, C::new(*v, 0.0)) < 1e-13, "{i}: {}", sol.value);
        assert!(crel(sol.deriv, C::new(*d, 0.0)) < 1e-13, "{i}: {}", sol.deriv);
    }
}

#[test]
fn kernel_matrices() {
    let want = [
        (Which::D, [-0.39621681827783035434, -0.32098919618942233067, -0.67695049543921844982, -0.54842143333425542909]),
        (Which::N, [0.29283800435567861923, 0.23723837882603916238, -0.68092886912150240375, -0.55164445394193197066]),
    ];
    for (w, v) in want {
        let k = kernel(w, 0.3, 0.6, C::new(2.0, 0.0), -0.25).unwrap();
        let got = [k[0][0], k[0][1], k[1][0], k[1][1]];
        for (a, b) in got.iter().zip(v) {
            assert!(crel(*a, C::new(b, 0.0)) < 1e-12, "{w:?}: {a} {b}");
        }
    }
}

#[test]
fn boundary_coefficients_by_quadrature() {
    let (f1, f2) = (|_: f64| 1.0, |x: f64| x);
    let l = C::new(2.5, 0.0);
    let d = boundary_coefficients(Which::D, &f1, &f2, l, 0.3).unwrap();
    let n = boundary_coefficients(Which::N, &f1, &f2, l, 0.3).unwrap();
    assert!(crel(d, C::new(-4.043950445447949883, 0.0)) < 1e-10, "{d}");
    assert!(crel(n, C::new(-1.7502768310583482864, 0.0)) < 1e-10, "{n}");
}

#[test]
fn tau_value() {
    let e = ratio(-9.3194533360031570798);
    let t = tau(C::new(2.0, 0.0), &e, 1.0 / 3.0).unwrap();
    assert!(crel(t, C::new(1.7893676996677907043, 0.0)) < 1e-12, "{t}");
}

#[test]
fn a_coefficients_from_fitting() {
    let want = [
        (2, C::new(-0.25, 0.0)),
        (3, C::new(0.0, -0.1875)),
        (4, C::new(0.28125, 0.0)),
        (5, C::new(0.0, 0.58007812499999999665)),
        (6, C::new(-1.4941406250000031228, 0.0)),
        (7, C::new(0.0, -4.5903625488261141977)),
    ];
    for (k, w) in want {
        let a = a_coefficient(0.25, 1.0, k).unwrap();
        assert!(crel(a, w) < 1e-10, "k={k}: {a} {w}");
    }
}

#[test]
fn second_order_values() {
    let g = cg(1.0 / 3.0);
    let e3 = ratio(3.0);
    assert!(rel(varrho(&e3, g).unwrap(), 2.8971656412176978593) < 1e-14);
    // ϱ = 3 exactly
    let e = ratio(9.0 / 2.8971656412176978593);
    let s = second_order_eigenvalues(&e, g, 2).unwrap();
    assert!(s.first_interval_root);
    for (m, w) in s.mu.iter().zip([1.9749539013438541502, 5.1417727037595758673]) {
        assert!((m - w).abs() < 1e-12, "{m} {w}");
    }
    let t = second_order_tau(2.0, &e, g).unwrap();
    assert!(rel(t, 8.495219853961617947) < 1e-12, "{t}");
}

#[test]
fn second_order_direct_kernels() {
    let d = direct_kernel(Which::D, 0.3, 0.6, 2.0, -0.25).unwrap();
    let n = direct_kernel(Which::N, 0.3, 0.6, 2.0, -0.25).unwrap();
    assert!(rel(d, -0.19810840913891517717) < 1e-12, "{d}");
    assert!(rel(n, 0.14641900217783930961) < 1e-12, "{n}");
}

#[test]
fn literal_pole_table_from_cli() {
    let cli = Cli::try_parse_from([
        "spectral", "poles", "--g", "-0.3333333", "--alpha", "0.7071", "--beta", "0.7071", "--k", "4", "--literal",
    ])
    .unwrap();
    let out = execute(&cli).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert!(rel(v["rho"].as_f64().unwrap(), -3.1064838409614785847) < 1e-14);
    let want = [
        (-0.6666666, -0.034155434073152654595),
        (-1.3333332, -0.019043699121322478188),
        (-1.9999998, -0.0070786677462050678667),
        (-2.6666664, -0.0019733901492668999674),
    ];
    let anomalous: Vec<&serde_json::Value> =
        v["poles"].as_array().unwrap().iter().filter(|p| p["source"] == "anomalous").collect();
    assert_eq!(anomalous.len(), 4);
    for (p, (loc, res)) in anomalous.iter().zip(want) {
        assert_eq!(p["location"].as_f64().unwrap(), loc);
        assert!(rel(p["residue"][0].as_f64().unwrap(), res) < 1e-13, "{p}");
        assert_eq!(p["residue"][1].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn zeta_plus_against_million_eigenvalue_sum() {
    // the oracle sums 10⁶ eigenvalues plus a ψ' tail; its own tail error is ≲ 1e-12
    let e = Extension::new(1.0, 1.0).unwrap();
    let v = zeta_plus_sum(&e, -1.0 / 3.0, C::new(2.0, 0.0), 100_000).unwrap();
    let err = (v.value - C::new(0.96071718745103655896, 0.0)).norm();
    assert!(err <= v.error_estimate + 1e-11, "{} err {err:e} est {:e}", v.value, v.error_estimate);
}
