//! Resolvent kernels of the D- and N-extensions, the boundary coefficients
//! C₁ᴰ and C₂ᴺ, the mixing function τ(λ) and closed-form traces.
//!
//! Conventions: X = λx, W[f,h] = f'h − fh' with respect to X, and
//! a = g − 1/2, b = 1/2 − g. The D-resolvent has γ_D = 1/W[L₁ᴰ,R₁] and the
//! N-resolvent γ_N = 1/W[L₁ᴺ,R₁]. With L_ν = J'_ν(λ)/J_ν(λ),
//!
//!   Tr G_D − Tr G_N = 2g/λ + L_b − L_a,
//!   ∂_λ Tr G_D = 1 − g²/λ² + (1/(2λ) + L_a)²,
//!   Tr G² = ∂_λ Tr G_D − ∂_λ[τ (Tr G_D − Tr G_N)].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::DD;
use crate::error::{Error, Result};
use crate::operator_model::{rho, Coupling, Extension};
use crate::quadrature::integrate_graded;
use crate::special_functions::{
    bessel_j_and_prime, bessel_j_complex, bessel_ratio, gamma, log_derivative_ratio,
};

use std::f64::consts::PI;

type C = Complex64;

/// Which limiting resolvent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    D,
    N,
}

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

/// Unscaled J_ν(z), J'_ν(z).
fn jpair(nu: f64, z: C) -> (C, C) {
    if z.im == 0.0 && z.re > 0.0 {
        let (j, jp) = bessel_j_and_prime(nu, z.re);
        (c(j), c(jp))
    } else {
        let p = bessel_j_complex(nu, z);
        let f = p.scale.exp();
        (p.j * f, p.jp * f)
    }
}

/// Bessel data at one argument: J_a, J_{a+1}, J_b, J_{b−1} and derivatives.
#[derive(Clone, Copy, Debug)]
struct Quad4 {
    ja: (C, C),
    ja1: (C, C),
    jb: (C, C),
    jb1: (C, C),
}

fn quad4(g: f64, z: C) -> Quad4 {
    let (a, b) = (g - 0.5, 0.5 - g);
    // all four orders directly: the three-term recurrence cancels badly as X → 0
    Quad4 {
        ja: jpair(a, z),
        ja1: jpair(a + 1.0, z),
        jb: jpair(b, z),
        jb1: jpair(b - 1.0, z),
    }
}

/// A solution value and its X-derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub value: C,
    pub deriv: C,
}

/// The six homogeneous solutions at X.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousSolutions {
    pub l1d: Solution,
    pub l2d: Solution,
    pub l1n: Solution,
    pub l2n: Solution,
    pub r1: Solution,
    pub r2: Solution,
}

/// √X·J with its X-derivative.
fn sqrt_times(sx: C, j: (C, C)) -> Solution {
    Solution {
        value: sx * j.0,
        deriv: j.0 / (sx * 2.0) + sx * j.1,
    }
}

impl Solution {
    fn lin(a: C, s: Solution, b: C, t: Solution) -> Solution {
        Solution {
            value: a * s.value + b * t.value,
            deriv: a * s.deriv + b * t.deriv,
        }
    }
}

fn solutions_from(q: &Quad4, lam: &Quad4, x: C) -> HomogeneousSolutions {
    let sx = x.sqrt();
    let l1d = sqrt_times(sx, q.ja);
    let l2d = sqrt_times(sx, q.ja1);
    let l1n = sqrt_times(sx, q.jb);
    let l2n = sqrt_times(sx, q.jb1);
    let (jal, jbl) = (lam.ja.0, lam.jb.0);
    HomogeneousSolutions {
        l1d,
        l2d,
        l1n,
        l2n,
        r1: Solution::lin(jal, l1n, -jbl, l1d),
        r2: Solution::lin(jal, l2n, jbl, l2d),
    }
}

/// L₁ᴰ, L₂ᴰ, L₁ᴺ, L₂ᴺ, R₁(X;λ), R₂(X;λ) and their X-derivatives.
pub fn homogeneous_solutions(g: f64, x: C, lambda: C) -> Result<HomogeneousSolutions> {
    check_g(g)?;
    if x.norm() == 0.0 || lambda.norm() == 0.0 {
        return Err(Error::Domain("X and λ must be nonzero".into()));
    }
    Ok(solutions_from(&quad4(g, x), &quad4(g, lambda), x))
}

fn check_g(g: f64) -> Result<()> {
    Coupling::new(g).map(|_| ())
}

/// The four Wronskian constants W[L₁ᴰ,R₁], W[L₂ᴰ,R₂], W[L₁ᴺ,R₁], W[L₂ᴺ,R₂].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wronskians {
    pub values: [C; 4],
    /// J_{g−1/2}(λ) vanishes: γ_D undefined.
    pub d_vanishes: bool,
    /// J_{1/2−g}(λ) vanishes: γ_N undefined.
    pub n_vanishes: bool,
}

fn vanishes(j: (C, C)) -> bool {
    j.0.norm() <= 1e-14 * j.1.norm().max(1e-300)
}

pub fn wronskians(g: f64, lambda: C) -> Result<Wronskians> {
    check_g(g)?;
    let q = quad4(g, lambda);
    let k = 2.0 / PI * (g * PI).cos();
    Ok(Wronskians {
        values: [-q.ja.0 * k, q.ja.0 * k, -q.jb.0 * k, -q.jb.0 * k],
        d_vanishes: vanishes(q.ja),
        n_vanishes: vanishes(q.jb),
    })
}

/// f'h − fh' at X.
pub fn wronskian_at(f: Solution, h: Solution) -> C {
    f.deriv * h.value - f.value * h.deriv
}

fn gamma_of(which: Which, g: f64, q: &Quad4, lambda: C) -> Result<C> {
    let j = match which {
        Which::D => q.ja,
        Which::N => q.jb,
    };
    if vanishes(j) {
        return Err(Error::Pole(format!(
            "λ = {lambda} is in the spectrum of the {which:?}-extension"
        )));
    }
    Ok(-PI / (2.0 * (g * PI).cos() * j.0))
}

/// G₁₁, G₂₂ and their x-derivatives at (x, y).
struct Diag {
    g11: C,
    g11x: C,
    g22: C,
    g22x: C,
}

fn diag_entries(which: Which, g: f64, x: f64, y: f64, lambda: C, ql: &Quad4, gam: C) -> Diag {
    let (xl, yl) = (lambda * x, lambda * y);
    let sx = solutions_from(&quad4(g, xl), ql, xl);
    let sy = solutions_from(&quad4(g, yl), ql, yl);
    let (l1x, l2x, l1y, l2y, s22) = match which {
        Which::D => (sx.l1d, sx.l2d, sy.l1d, sy.l2d, -gam),
        Which::N => (sx.l1n, sx.l2n, sy.l1n, sy.l2n, gam),
    };
    // the x-derivative of f(λx) is λ f'(X)
    let (g11, g11x, g22, g22x) = if x <= y {
        (
            gam * l1x.value * sy.r1.value,
            gam * lambda * l1x.deriv * sy.r1.value,
            s22 * l2x.value * sy.r2.value,
            s22 * lambda * l2x.deriv * sy.r2.value,
        )
    } else {
        (
            gam * sx.r1.value * l1y.value,
            gam * lambda * sx.r1.deriv * l1y.value,
            s22 * sx.r2.value * l2y.value,
            s22 * lambda * sx.r2.deriv * l2y.value,
        )
    };
    Diag { g11, g11x, g22, g22x }
}

fn check_point(x: f64, y: f64, lambda: C) -> Result<()> {
    if !(x > 0.0 && x <= 1.0 && y > 0.0 && y <= 1.0) {
        return Err(Error::Domain(format!("(x, y) = ({x}, {y}) outside (0,1]²")));
    }
    if lambda.norm() == 0.0 {
        return Err(Error::Domain("λ = 0".into()));
    }
    Ok(())
}

/// The 2×2 resolvent kernel G(x,y;λ) of the D- or N-extension. For x = y
/// the off-diagonal entries take the one-sided limit from x < y.
pub fn kernel(which: Which, x: f64, y: f64, lambda: C, g: f64) -> Result<[[C; 2]; 2]> {
    check_g(g)?;
    check_point(x, y, lambda)?;
    let ql = quad4(g, lambda);
    let gam = gamma_of(which, g, &ql, lambda)?;
    let d = diag_entries(which, g, x, y, lambda, &ql, gam);
    let g21 = (-d.g11x + d.g11 * (g / x)) / lambda;
    let g12 = (d.g22x + d.g22 * (g / x)) / lambda;
    Ok([[d.g11, g12], [g21, d.g22]])
}

/// Kernel of a general extension: (1 − τ) G_D + τ G_N.
pub fn kernel_general(ext: &Extension, x: f64, y: f64, lambda: C, g: f64) -> Result<[[C; 2]; 2]> {
    if ext.is_dirichlet() {
        return kernel(Which::D, x, y, lambda, g);
    }
    if ext.is_neumann() {
        return kernel(Which::N, x, y, lambda, g);
    }
    let t = tau(lambda, ext, g)?;
    let kd = kernel(Which::D, x, y, lambda, g)?;
    let kn = kernel(Which::N, x, y, lambda, g)?;
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (C::new(1.0, 0.0) - t) * kd[i][j] + t * kn[i][j];
        }
    }
    Ok(out)
}

/// Φ(x) = ∫₀¹ G(x,y;λ) f(y) dy by quadrature split at y = x.
pub fn apply_kernel(
    which: Which,
    x: f64,
    f1: &dyn Fn(f64) -> f64,
    f2: &dyn Fn(f64) -> f64,
    lambda: C,
    g: f64,
) -> Result<[C; 2]> {
    check_g(g)?;
    let ql = quad4(g, lambda);
    let gam = gamma_of(which, g, &ql, lambda)?;
    let pieces = 2 + lambda.norm() as usize;
    let mut acc = [C::new(0.0, 0.0); 2];
    let mut add = |y: f64, w: f64| {
        let d = diag_entries(which, g, x, y, lambda, &ql, gam);
        let g21 = (-d.g11x + d.g11 * (g / x)) / lambda;
        let g12 = (d.g22x + d.g22 * (g / x)) / lambda;
        let (a, b) = (f1(y), f2(y));
        acc[0] += (d.g11 * a + g12 * b) * w;
        acc[1] += (g21 * a + d.g22 * b) * w;
    };
    // [0, x]: graded toward 0; [x, 1]: graded toward x on both sides of 0
    for (t, w) in crate::quadrature::graded_rule(x, 1e-30, 16, 2) {
        add(t, w);
    }
    let span = 1.0 - x;
    if span > 0.0 {
        for (t, w) in crate::quadrature::graded_rule(span, 1e-30 * span.max(x), 16, pieces) {
            add(x + t, w);
        }
    }
    Ok(acc)
}

/// C₁ᴰ[Φ] (for D) or C₂ᴺ[Φ] (for N) of Φ = ∫G f.
pub fn boundary_coefficients(
    which: Which,
    f1: &dyn Fn(f64) -> f64,
    f2: &dyn Fn(f64) -> f64,
    lambda: C,
    g: f64,
) -> Result<C> {
    check_g(g)?;
    if lambda.norm() == 0.0 {
        return Err(Error::Domain("λ = 0".into()));
    }
    let ql = quad4(g, lambda);
    gamma_of(which, g, &ql, lambda)?;
    let pieces = 2 + lambda.norm() as usize;
    let integral: C = integrate_graded(1.0, 1e-30, 16, pieces, |y| {
        let yl = lambda * y;
        let s = solutions_from(&quad4(g, yl), &ql, yl);
        s.r1.value * f1(y) - s.r2.value * f2(y)
    });
    let cg = (g * PI).cos();
    Ok(match which {
        Which::D => {
            -lambda.powf(g) * PI / (2f64.powf(0.5 + g) * cg * ql.ja.0 * gamma(0.5 + g)) * integral
        }
        Which::N => {
            lambda.powf(-g) * PI / (2f64.powf(0.5 - g) * cg * ql.jb.0 * gamma(0.5 - g)) * integral
        }
    })
}

/// C₁ᴰ (D) or C₂ᴺ (N) read off from the small-x behaviour of Φ = ∫G f,
/// fitting φ/x^{±g} = C + a x^{1+g} + b x^{1−g} at three small x.
pub fn small_x_extraction(
    which: Which,
    f1: &dyn Fn(f64) -> f64,
    f2: &dyn Fn(f64) -> f64,
    lambda: C,
    g: f64,
) -> Result<C> {
    let xs = [1e-4, 1e-5, 1e-6];
    let mut rows = [[0.0; 3]; 3];
    let mut rhs = [C::new(0.0, 0.0); 3];
    for (i, &x) in xs.iter().enumerate() {
        let phi = apply_kernel(which, x, f1, f2, lambda, g)?;
        rhs[i] = match which {
            Which::D => phi[0] / x.powf(g),
            Which::N => phi[1] / x.powf(-g),
        };
        rows[i] = [1.0, x.powf(1.0 + g), x.powf(1.0 - g)];
    }
    Ok(solve3(rows, rhs)[0])
}

fn solve3(mut m: [[f64; 3]; 3], mut r: [C; 3]) -> [C; 3] {
    for k in 0..3 {
        let p = (k..3).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap();
        m.swap(k, p);
        r.swap(k, p);
        for i in k + 1..3 {
            let f = m[i][k] / m[k][k];
            for j in k..3 {
                m[i][j] -= f * m[k][j];
            }
            let rk = r[k];
            r[i] -= rk * f;
        }
    }
    let mut out = [C::new(0.0, 0.0); 3];
    for k in (0..3).rev() {
        let mut s = r[k];
        for j in k + 1..3 {
            s -= out[j] * m[k][j];
        }
        out[k] = s / m[k][k];
    }
    out
}

fn near_axis(lambda: C) -> bool {
    let r = lambda.norm();
    r >= 1.0 && (lambda.re / r).abs().asin() <= 10f64.to_radians()
}

/// (J'_b/J_b, J'_a/J_a) at λ, with pole checks.
fn log_derivs(g: f64, lambda: C) -> Result<(C, C)> {
    let (a, b) = (g - 0.5, 0.5 - g);
    if near_axis(lambda) && lambda.im != 0.0 {
        return Ok((log_derivative_ratio(b, lambda)?, log_derivative_ratio(a, lambda)?));
    }
    let pa = jpair(a, lambda);
    let pb = jpair(b, lambda);
    if vanishes(pa) {
        return Err(Error::Pole(format!("λ = {lambda} is a zero of J_(g-1/2)")));
    }
    if vanishes(pb) {
        return Err(Error::Pole(format!("λ = {lambda} is a zero of J_(1/2-g)")));
    }
    Ok((pb.1 / pb.0, pa.1 / pa.0))
}

/// J_{1/2−g}(λ)/J_{g−1/2}(λ).
fn secular_ratio(g: f64, lambda: C) -> Result<C> {
    let (a, b) = (g - 0.5, 0.5 - g);
    if near_axis(lambda) && lambda.im != 0.0 {
        return bessel_ratio(b, a, lambda);
    }
    let pa = jpair(a, lambda);
    if vanishes(pa) {
        return Err(Error::Pole(format!("λ = {lambda} is a zero of J_(g-1/2)")));
    }
    Ok(jpair(b, lambda).0 / pa.0)
}

/// r = F(λ)/ρ for a general extension.
fn f_over_rho(lambda: C, ext: &Extension, g: f64) -> Result<C> {
    let r = rho(ext, Coupling::new(g)?)?;
    Ok(lambda.powf(2.0 * g) * secular_ratio(g, lambda)? / r)
}

/// τ(λ) = 1 − 1/(1 − F(λ)/ρ); 0 for D and 1 for N.
pub fn tau(lambda: C, ext: &Extension, g: f64) -> Result<C> {
    check_g(g)?;
    if ext.is_dirichlet() {
        return Ok(c(0.0));
    }
    if ext.is_neumann() {
        return Ok(c(1.0));
    }
    let r = f_over_rho(lambda, ext, g)?;
    let den = C::new(1.0, 0.0) - r;
    if den.norm() <= 1e-14 * (1.0 + r.norm()) {
        return Err(Error::Pole(format!("λ = {lambda} is an eigenvalue of the extension")));
    }
    Ok(C::new(1.0, 0.0) - C::new(1.0, 0.0) / den)
}

/// ∂_λ Tr G_D = 1 − g²/λ² + (1/(2λ) + J'_{g−1/2}/J_{g−1/2})².
pub fn trace_dgd(lambda: C, g: f64) -> Result<C> {
    check_g(g)?;
    let (_, la) = log_derivs(g, lambda)?;
    let t = C::new(0.5, 0.0) / lambda + la;
    Ok(C::new(1.0, 0.0) - g * g / (lambda * lambda) + t * t)
}

/// Tr G_D − Tr G_N = 2g/λ + J'_{1/2−g}/J_{1/2−g} − J'_{g−1/2}/J_{g−1/2}.
pub fn trace_diff(lambda: C, g: f64) -> Result<C> {
    check_g(g)?;
    let (lb, la) = log_derivs(g, lambda)?;
    Ok(2.0 * g / lambda + lb - la)
}

/// ∂_λ of `trace_diff`:
/// −2g/λ² + (1/(2λ) + J'_{g−1/2}/J_{g−1/2})² − (1/(2λ) + J'_{1/2−g}/J_{1/2−g})².
pub fn trace_diff_deriv(lambda: C, g: f64) -> Result<C> {
    check_g(g)?;
    let (lb, la) = log_derivs(g, lambda)?;
    let h = C::new(0.5, 0.0) / lambda;
    Ok(-2.0 * g / (lambda * lambda) + (h + la) * (h + la) - (h + lb) * (h + lb))
}

/// Tr G² = Σ (λ_n − λ)^{−2} for the extension.
pub fn trace_g2(lambda: C, ext: &Extension, g: f64) -> Result<C> {
    let dgd = trace_dgd(lambda, g)?;
    if ext.is_dirichlet() {
        return Ok(dgd);
    }
    let dd = trace_diff_deriv(lambda, g)?;
    if ext.is_neumann() {
        return Ok(dgd - dd);
    }
    let diff = trace_diff(lambda, g)?;
    let r = f_over_rho(lambda, ext, g)?;
    let one = C::new(1.0, 0.0);
    let den = r - one;
    if den.norm() <= 1e-14 * (1.0 + r.norm()) {
        return Err(Error::Pole(format!("λ = {lambda} is an eigenvalue of the extension")));
    }
    let t = r / den;
    // τ' = −ρF'/(F−ρ)² with F' = F·diff
    let tp = -r * diff / (den * den);
    Ok(dgd - tp * diff - t * dd)
}

/// ∫₀¹ tr G(x,x;λ) dx in closed form: J_{g+1/2}/J_{g−1/2} for D and
/// −2g/λ − J_{−g−1/2}/J_{1/2−g} for N.
pub fn trace_g(which: Which, lambda: C, g: f64) -> Result<C> {
    check_g(g)?;
    let (lb, la) = log_derivs(g, lambda)?;
    let (a, b) = (g - 0.5, 0.5 - g);
    Ok(match which {
        Which::D => a / lambda - la,
        Which::N => -2.0 * g / lambda - (b / lambda + lb),
    })
}

/// tr G(x,x;λ) and its λ-derivative from the kernel.
fn diag_trace(which: Which, g: f64, x: f64, lambda: C, ql: &Quad4, gam: C) -> (C, C) {
    let xl = lambda * x;
    let q = quad4(g, xl);
    let s = solutions_from(&q, ql, xl);
    let sx = xl.sqrt();
    // ∂_λ R(λx;λ) = x R'(X) + √X [J'_a(λ) J_•(X) ± J'_b(λ) J_•(X)]
    let r1l = s.r1.deriv * x + sx * (ql.ja.1 * q.jb.0 - ql.jb.1 * q.ja.0);
    let r2l = s.r2.deriv * x + sx * (ql.ja.1 * q.jb1.0 + ql.jb.1 * q.ja1.0);
    let (l1, l2, s22, jl) = match which {
        Which::D => (s.l1d, s.l2d, -1.0, ql.ja),
        Which::N => (s.l1n, s.l2n, 1.0, ql.jb),
    };
    let inner = l1.value * s.r1.value + s22 * l2.value * s.r2.value;
    let inner_l = l1.deriv * x * s.r1.value
        + l1.value * r1l
        + s22 * (l2.deriv * x * s.r2.value + l2.value * r2l);
    let gam_l = -gam * jl.1 / jl.0;
    (gam * inner, gam_l * inner + gam * inner_l)
}

/// Quadrature of ∫₀¹ ∂_λ tr G_D(x,x;λ) dx and ∫₀¹ tr(G_D − G_N)(x,x;λ) dx
/// on a mesh graded toward x = 0.
pub fn traces_by_quadrature(lambda: C, g: f64) -> Result<(C, C)> {
    check_g(g)?;
    let ql = quad4(g, lambda);
    let gd = gamma_of(Which::D, g, &ql, lambda)?;
    let gn = gamma_of(Which::N, g, &ql, lambda)?;
    let pieces = 4 + 2 * lambda.norm() as usize;
    let mut dgd = C::new(0.0, 0.0);
    let mut diff = C::new(0.0, 0.0);
    for (x, w) in crate::quadrature::graded_rule(1.0, 1e-30, 20, pieces) {
        let (td, tdl) = diag_trace(Which::D, g, x, lambda, &ql, gd);
        let (tn, _) = diag_trace(Which::N, g, x, lambda, &ql, gn);
        dgd += tdl * w;
        diff += (td - tn) * w;
    }
    Ok((dgd, diff))
}

/// Imaginary-axis values at λ = iμ in double-double, with
/// y_ν = I'_ν(μ)/I_ν(μ):
/// ∂_λ Tr G_D(iμ) = 1 + g²/μ² − (y_a + 1/(2μ))²,
/// (Tr G_D − Tr G_N)(iμ) = −i D, D = 2g/μ + y_b − y_a.
#[derive(Clone, Copy, Debug)]
pub struct RayValues {
    pub dgd: DD,
    pub d: DD,
    /// dD/dμ.
    pub d_mu: DD,
    /// p = μ^{2g} I_b(μ)/I_a(μ), so that F(iμ) = i p.
    pub p: f64,
}

pub fn ray_values(mu: f64, g: f64) -> RayValues {
    use crate::special_functions::{modified_log_derivative_dd, modified_ratio_dd};
    let (a, b) = (g - 0.5, 0.5 - g);
    let ya = modified_log_derivative_dd(a, mu);
    let yb = modified_log_derivative_dd(b, mu);
    let inv = DD::ONE / DD::new(mu);
    let gd = DD::new(g);
    let t = ya + inv * 0.5;
    let dgd = DD::ONE + gd * gd * inv * inv - t * t;
    let delta = yb - ya;
    let d = gd * inv * 2.0 + delta;
    let d_mu = -(gd * inv * inv * 2.0) - delta * inv - delta * (ya + yb);
    let p = mu.powf(2.0 * g) * modified_ratio_dd(b, a, mu).to_f64();
    RayValues { dgd, d, d_mu, p }
}

/// Tr G²(iμ) on the upper ray, split into the double-double part
/// ∂_λ Tr G_D and the remaining τ-dependent part d(τD)/dμ.
pub fn ray_trace_g2(mu: f64, ext: &Extension, g: f64) -> Result<(DD, C)> {
    let v = ray_values(mu, g);
    if ext.is_dirichlet() {
        return Ok((v.dgd, c(0.0)));
    }
    if ext.is_neumann() {
        return Ok((v.dgd, c(v.d_mu.to_f64())));
    }
    let r = rho(ext, Coupling::new(g)?)?;
    let p = C::new(v.p, 0.0);
    let ir = C::new(0.0, r);
    let t = p / (p + ir);
    let t_mu = ir * p * v.d.to_f64() / ((p + ir) * (p + ir));
    Ok((v.dgd, t_mu * v.d.to_f64() + t * v.d_mu.to_f64()))
}
