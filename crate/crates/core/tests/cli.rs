//! The `spectral` binary: output formats, determinism and exit codes.

use std::f64::consts::PI;
use std::process::{Command, Output};

use spectral_core::special_functions::bessel_zeros;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectral")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn elementary_spectrum_as_csv() {
    let o = run(&["spectrum", "--g", "0", "--alpha", "0", "--beta", "1", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("side,n,lambda,bracket_lo,bracket_hi"));
    for (n, line) in lines.enumerate() {
        let v: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((v - (n as f64 + 0.5) * PI).abs() < 1e-12, "{line}");
    }
}

#[test]
fn figure_has_gaps_at_the_asymptotes() {
    let o = run(&["figure1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<(f64, f64, f64, usize)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    let zeros = bessel_zeros(-1.0 / 6.0, 4).unwrap();
    assert!(rows.iter().all(|r| r.2 == 3.0 && r.1.abs() <= 50.0 && r.0 < zeros[3]));
    // one segment per branch, each asymptote falls in the gap between segments
    for k in 0..3 {
        let last = rows.iter().filter(|r| r.3 == k).map(|r| r.0).fold(f64::MIN, f64::max);
        let first = rows.iter().filter(|r| r.3 == k + 1).map(|r| r.0).fold(f64::MAX, f64::min);
        assert!(last < zeros[k] && zeros[k] < first, "asymptote {k}: {last} {} {first}", zeros[k]);
        assert!(first - last > 2.0 * zeros[3] / 2000.0);
    }
}

#[test]
fn output_is_deterministic_and_json_round_trips() {
    let args = ["zeta", "--g", "-0.3", "--alpha", "1", "--beta", "2", "--s", "2", "--s", "-0.5+0.25i", "--part", "full"];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", a);
    assert_eq!(v[1]["s"], serde_json::json!([-0.5, 0.25]));
    assert_eq!(v[0]["method"], "continuation");
}

#[test]
fn pole_locations_have_fifteen_digits() {
    let o = run(&["poles", "--g", "0.3", "--alpha", "1", "--beta", "1", "--k", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for p in v["poles"].as_array().unwrap() {
        let x = p["location"].as_f64().unwrap();
        assert_eq!(format!("{x:.14e}").parse::<f64>().unwrap(), x);
    }
}

#[test]
fn exit_codes() {
    // configuration and domain errors
    assert_eq!(run(&["spectrum", "--g", "0.7"]).status.code(), Some(1));
    assert_eq!(run(&["zeta", "--s", "2", "--order", "13"]).status.code(), Some(1));
    assert_eq!(run(&["zeta", "--s", "0.5", "--method", "sum"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "--bogus"]).status.code(), Some(1));
    // numerical: too close to the pole at s = 1
    assert_eq!(run(&["zeta", "--s", "1"]).status.code(), Some(2));
    // structural: λ on the D-spectrum
    let j = bessel_zeros(1.0 / 3.0 - 0.5, 1).unwrap()[0].to_string();
    let o = run(&["traces", "--alpha", "0", "--beta", "1", "--lambda", &j]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_reports_each_check() {
    let o = run(&["verify", "--criterion", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("PASS [8a]")), "{text}");
    let o = run(&["verify", "--criterion", "8", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["passed"], true);
}

#[test]
fn csv_and_json_agree_for_second_order() {
    let j = stdout(&run(&["second-order", "--g", "0.2", "--alpha", "0", "--beta", "1", "--n", "4"]));
    let c = stdout(&run(&["second-order", "--g", "0.2", "--alpha", "0", "--beta", "1", "--n", "4", "--format", "csv"]));
    let v: serde_json::Value = serde_json::from_str(&j).unwrap();
    for (i, line) in c.lines().skip(1).enumerate() {
        let mu: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(mu, v["mu"][i].as_f64().unwrap());
    }
    assert_eq!(v["varrho"], serde_json::Value::Null);
}
