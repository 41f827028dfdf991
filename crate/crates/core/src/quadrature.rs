//! Gauss–Legendre panels, cached by degree, with geometric grading toward
//! an endpoint singularity at 0.

use std::collections::HashMap;
use std::ops::{Add, Mul};
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::GaussLegendre;
use num_traits::Zero;

type Rule = Arc<Vec<(f64, f64)>>;

/// Nodes and weights on [−1, 1], ordered by increasing node.
pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(n.max(2)).expect("degree at least 2");
            let mut v: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            Arc::new(v)
        })
        .clone()
}

/// n-point Gauss–Legendre on [a, b].
pub fn integrate<T, F>(a: f64, b: f64, n: usize, mut f: F) -> T
where
    T: Zero + Add<Output = T> + Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let rule = gauss_legendre(n);
    let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
    let mut s = T::zero();
    for &(x, w) in rule.iter() {
        s = s + f(c + h * x) * (w * h);
    }
    s
}

/// Nodes and weights for ∫₀^top: `pieces` equal panels on [top/2, top] and
/// panels [top/2^{k+1}, top/2^k] below, down to `min_x`.
pub fn graded_rule(top: f64, min_x: f64, n: usize, pieces: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(n);
    let mut out = Vec::new();
    let mut push = |a: f64, b: f64| {
        let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
        for &(x, w) in rule.iter() {
            out.push((c + h * x, w * h));
        }
    };
    let half = 0.5 * top;
    let m = pieces.max(1);
    for i in 0..m {
        push(half + half * i as f64 / m as f64, half + half * (i + 1) as f64 / m as f64);
    }
    let mut b = half;
    while b > min_x {
        push(0.5 * b, b);
        b *= 0.5;
    }
    out
}

/// ∫₀^top f over the graded rule.
pub fn integrate_graded<T, F>(top: f64, min_x: f64, n: usize, pieces: usize, mut f: F) -> T
where
    T: Zero + Add<Output = T> + Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let mut s = T::zero();
    for (x, w) in graded_rule(top, min_x, n, pieces) {
        s = s + f(x) * w;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn polynomial_exactness() {
        let v: f64 = integrate(0.0, 2.0, 5, |x| x.powi(9));
        assert!((v - 102.4).abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = gauss_legendre(20).iter().map(|p| p.1).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^{−0.6} dx = 2.5
        let v: f64 = integrate_graded(1.0, 1e-30, 12, 1, |x| x.powf(-0.6));
        assert!((v - 2.5).abs() < 1e-10);
    }

    #[test]
    fn complex_values() {
        let v: Complex64 = integrate(0.0, std::f64::consts::PI, 20, |x| Complex64::new(0.0, x).exp());
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }
}
