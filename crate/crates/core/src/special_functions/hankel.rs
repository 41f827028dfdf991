//! Hankel large-argument series P, Q, R, S and T±.
//!
//! With w = 1/(2z) and a_m = ⟨ν,m⟩ w^m,
//! P = Σ_even (−1)^{m/2} a_m, Q = Σ_odd (−1)^{(m−1)/2} a_m,
//! and R, S are the same sums over b_m = a_m + (2m−1) a_{m−1} w.

use num_complex::Complex64;

const MAX_TERMS: usize = 400;

#[derive(Clone, Copy, Debug)]
pub struct HankelPQ {
    pub p: Complex64,
    pub q: Complex64,
    /// Magnitude of the first omitted term (enlarged when the series
    /// started diverging before the requested order).
    pub remainder: f64,
    pub diverged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct HankelRST {
    pub r: Complex64,
    pub s: Complex64,
    pub t_plus: Complex64,
    pub t_minus: Complex64,
    pub remainder: f64,
    pub diverged: bool,
}

/// a_m for m = 0..=n.
fn a_terms(nu: f64, z: Complex64, n: usize) -> Vec<Complex64> {
    let mu = 4.0 * nu * nu;
    let w = 0.5 / z;
    let mut out = Vec::with_capacity(n + 1);
    let mut a = Complex64::new(1.0, 0.0);
    out.push(a);
    for m in 1..=n {
        let c = (2 * m - 1) as f64;
        a = a * w * ((mu - c * c) / (4 * m) as f64);
        out.push(a);
    }
    out
}

/// Index of the first term that is larger than its predecessor in the
/// combined sequence, if any occurs at or before `k`.
fn divergence_onset(a: &[Complex64], k: usize) -> Option<usize> {
    (2..=k.min(a.len() - 1)).find(|&m| a[m - 1].norm() > 0.0 && a[m].norm() > a[m - 1].norm())
}

fn sign_even(m: usize) -> f64 {
    if (m / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn split(terms: &[Complex64], upto: usize) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    for (m, t) in terms.iter().enumerate().take(upto + 1) {
        if m % 2 == 0 {
            p += t * sign_even(m);
        } else {
            q += t * sign_even(m - 1);
        }
    }
    (p, q)
}

/// P and Q truncated after the term (±i/2z)^K.
pub fn hankel_pq(nu: f64, z: Complex64, k: usize) -> HankelPQ {
    let a = a_terms(nu, z, k + 1);
    match divergence_onset(&a, k) {
        Some(m) => {
            let (p, q) = split(&a, m - 1);
            HankelPQ {
                p,
                q,
                remainder: a[m - 1].norm() + a[m].norm(),
                diverged: true,
            }
        }
        None => {
            let (p, q) = split(&a, k);
            HankelPQ {
                p,
                q,
                remainder: a[k + 1].norm(),
                diverged: false,
            }
        }
    }
}

/// R, S and T± truncated after the term of order K.
pub fn hankel_rst(nu: f64, z: Complex64, k: usize) -> HankelRST {
    let a = a_terms(nu, z, k + 1);
    let w = 0.5 / z;
    let b: Vec<Complex64> = (0..a.len())
        .map(|m| {
            if m == 0 {
                a[0]
            } else {
                a[m] + a[m - 1] * w * (2 * m - 1) as f64
            }
        })
        .collect();
    let (upto, diverged, remainder) = match divergence_onset(&b, k) {
        Some(m) => (m - 1, true, b[m - 1].norm() + b[m].norm()),
        None => (k, false, b[k + 1].norm()),
    };
    let (r, s) = split(&b, upto);
    let iw = Complex64::new(0.0, 1.0) * w;
    let mut t_plus = Complex64::new(0.0, 0.0);
    let mut t_minus = Complex64::new(0.0, 0.0);
    for m in 1..=upto {
        let h = crate::special_functions::hankel_symbol(nu, m - 1) * (2 * m - 1) as f64;
        t_plus += iw.powu(m as u32) * h;
        t_minus += (-iw).powu(m as u32) * h;
    }
    HankelRST {
        r,
        s,
        t_plus,
        t_minus,
        remainder,
        diverged,
    }
}

/// Optimally truncated sum of one alternating subsequence: terms are summed
/// up to the smallest one, which enters with weight 1/2.
fn optimal_sum(terms: &[Complex64]) -> (Complex64, f64) {
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, t) in terms.iter().enumerate() {
        let next = terms.get(j + 1);
        match next {
            Some(n) if n.norm() > t.norm() && t.norm() > 0.0 => {
                return (sum + t * 0.5, 0.5 * t.norm());
            }
            Some(_) => sum += t,
            None => {
                sum += t;
                return (sum, t.norm());
            }
        }
        if t.norm() < 1e-18 * sum.norm().max(1e-300) && t.norm() > 0.0 {
            return (sum, t.norm());
        }
    }
    (sum, 0.0)
}

/// Automatically truncated P, Q (and R, S when `deriv`) for evaluation.
pub(crate) struct HankelAuto {
    pub p: Complex64,
    pub q: Complex64,
    pub r: Complex64,
    pub s: Complex64,
    pub remainder: f64,
}

pub(crate) fn hankel_auto(nu: f64, z: Complex64, deriv: bool) -> HankelAuto {
    let mu = 4.0 * nu * nu;
    let w = 0.5 / z;
    let mut a = Vec::with_capacity(64);
    let mut t = Complex64::new(1.0, 0.0);
    a.push(t);
    let mut m = 1;
    loop {
        let c = (2 * m - 1) as f64;
        t = t * w * ((mu - c * c) / (4 * m) as f64);
        a.push(t);
        if t.norm() < 1e-20 && m >= 3 {
            break;
        }
        // past the optimal point of both subsequences
        if m >= 4 && a[m].norm() > a[m - 2].norm() && a[m - 1].norm() > a[m - 3].norm() {
            a.push(a[m] * w * ((mu - (2 * m + 1) as f64 * (2 * m + 1) as f64) / (4 * (m + 1)) as f64));
            break;
        }
        if m >= MAX_TERMS {
            break;
        }
        m += 1;
    }
    let sub = |v: &[Complex64], parity: usize| -> Vec<Complex64> {
        v.iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == parity)
            .map(|(i, x)| x * sign_even(i - parity))
            .collect()
    };
    let (p, ep) = optimal_sum(&sub(&a, 0));
    let (q, eq) = optimal_sum(&sub(&a, 1));
    let (mut r, mut s, mut er, mut es) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0, 0.0);
    if deriv {
        let b: Vec<Complex64> = (0..a.len())
            .map(|m| {
                if m == 0 {
                    a[0]
                } else {
                    a[m] + a[m - 1] * w * (2 * m - 1) as f64
                }
            })
            .collect();
        let rr = optimal_sum(&sub(&b, 0));
        let ss = optimal_sum(&sub(&b, 1));
        r = rr.0;
        er = rr.1;
        s = ss.0;
        es = ss.1;
    }
    HankelAuto {
        p,
        q,
        r,
        s,
        remainder: ep.max(eq).max(er).max(es),
    }
}

/// Optimal truncation of one alternating subsequence, fed term by term.
#[derive(Clone, Copy)]
struct Truncator {
    sum: f64,
    pending: Option<f64>,
    done: bool,
    remainder: f64,
}

impl Truncator {
    fn new() -> Truncator {
        Truncator { sum: 0.0, pending: None, done: false, remainder: 0.0 }
    }

    fn push(&mut self, t: f64) {
        if self.done {
            return;
        }
        match self.pending {
            Some(p) if t.abs() > p.abs() && p != 0.0 => {
                self.sum += 0.5 * p;
                self.remainder = 0.5 * p.abs();
                self.done = true;
            }
            Some(p) => {
                self.sum += p;
                if p != 0.0 && p.abs() < 1e-18 * self.sum.abs() {
                    self.remainder = p.abs();
                    self.done = true;
                } else {
                    self.pending = Some(t);
                }
            }
            None => self.pending = Some(t),
        }
    }

    fn finish(&mut self) {
        if !self.done {
            if let Some(p) = self.pending {
                self.sum += p;
                self.remainder = p.abs();
            }
            self.done = true;
        }
    }
}

/// P, Q, R, S for real z without allocation. Returns (p, q, r, s, remainder).
pub(crate) fn hankel_real_fast(nu: f64, z: f64) -> (f64, f64, f64, f64, f64) {
    let mu = 4.0 * nu * nu;
    let w = 0.5 / z;
    let mut tr = [Truncator::new(); 4];
    let mut a = 1.0;
    tr[0].push(1.0);
    tr[2].push(1.0);
    for m in 1..MAX_TERMS {
        let c = (2 * m - 1) as f64;
        let prev = a;
        a *= w * ((mu - c * c) / (4 * m) as f64);
        let b = a + prev * w * c;
        let (ia, ib, sgn) = if m % 2 == 0 { (0, 2, sign_even(m)) } else { (1, 3, sign_even(m - 1)) };
        tr[ia].push(sgn * a);
        tr[ib].push(sgn * b);
        if tr.iter().all(|t| t.done) {
            break;
        }
    }
    for t in tr.iter_mut() {
        t.finish();
    }
    let rem = tr.iter().fold(0.0f64, |r, t| r.max(t.remainder));
    (tr[0].sum, tr[1].sum, tr[2].sum, tr[3].sum, rem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_term() {
        let h = hankel_pq(0.3, Complex64::new(5.0, 0.0), 0);
        assert_eq!(h.p, Complex64::new(1.0, 0.0));
        assert_eq!(h.q, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn first_coefficient_is_symbol() {
        // P + iQ at order 1 equals 1 + ⟨ν,1⟩ (i/2z)
        let z = Complex64::new(7.0, 2.0);
        let h = hankel_pq(0.3, z, 1);
        let lhs = h.p + Complex64::i() * h.q;
        let rhs = 1.0 + Complex64::i() / (2.0 * z) * super::super::hankel_symbol(0.3, 1);
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn t_leading_term() {
        let z = Complex64::new(0.0, 30.0);
        let h = hankel_rst(0.2, z, 1);
        let e = Complex64::i() / (2.0 * z);
        assert!((h.t_plus - e).norm() < 1e-16);
        assert!((h.t_minus + e).norm() < 1e-16);
    }

    #[test]
    fn r_leading_term() {
        let h = hankel_rst(0.2, Complex64::new(40.0, 0.0), 0);
        assert_eq!(h.r, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rs_identity_through_order_eight() {
        let z = Complex64::new(0.0, 30.0);
        let k = 8;
        let pq = hankel_pq(0.2, z, k);
        let rst = hankel_rst(0.2, z, k);
        let i = Complex64::i();
        let plus = rst.r + i * rst.s - (pq.p + i * pq.q) - rst.t_plus;
        let minus = rst.r - i * rst.s - (pq.p - i * pq.q) - rst.t_minus;
        assert!(plus.norm() < 1e-15, "{plus}");
        assert!(minus.norm() < 1e-15, "{minus}");
    }

    #[test]
    fn fast_path_matches_general() {
        for &(nu, z) in &[(0.3, 25.0), (-1.2, 21.0), (0.9, 400.0)] {
            let h = hankel_auto(nu, Complex64::new(z, 0.0), true);
            let (p, q, r, s, _) = hankel_real_fast(nu, z);
            assert!((h.p.re - p).abs() < 1e-15 && (h.q.re - q).abs() < 1e-15);
            assert!((h.r.re - r).abs() < 1e-15 && (h.s.re - s).abs() < 1e-15);
        }
    }

    #[test]
    fn divergence_is_flagged() {
        let h = hankel_pq(1.2, Complex64::new(1.0, 0.0), 30);
        assert!(h.diverged);
        assert!(h.remainder > 0.0);
    }
}
