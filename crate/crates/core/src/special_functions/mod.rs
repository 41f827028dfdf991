//! Bessel functions of real order |ν| < 3/2 and the large-argument machinery
//! built on the Hankel symbols.
//!
//! Real arguments use a double-double power series for `z <= SERIES_LIMIT`
//! and the Hankel expansion beyond. Points on the imaginary axis go through
//! ratios of modified Bessel functions so nothing overflows.

mod bessel;
mod hankel;
mod modified;
mod primitives;
mod zeros;

pub use bessel::{
    bessel_j, bessel_j_and_prime, bessel_j_complex, bessel_j_hankel, bessel_j_prime,
    bessel_j_series, ScaledPair,
};
pub use hankel::{hankel_pq, hankel_rst, HankelPQ, HankelRST};
pub use modified::{
    bessel_ratio, log_derivative_ratio, modified_log_derivative, modified_ratio,
    modified_scaled,
};
pub(crate) use modified::{modified_log_derivative_dd, modified_ratio_dd};
pub use primitives::product_primitive;
pub use zeros::{bessel_zero, bessel_zeros, mcmahon};

use crate::error::{Error, Result};

/// Crossover between the power series and the Hankel expansion for real `z`.
pub const SERIES_LIMIT: f64 = 20.0;

/// Bessel order ν with |ν| < 3/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Order(f64);

impl Order {
    pub fn new(nu: f64) -> Result<Order> {
        if nu.is_finite() && nu.abs() < 1.5 {
            Ok(Order(nu))
        } else {
            Err(Error::Domain(format!("order {nu} outside (-3/2, 3/2)")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Half-plane label: `Upper` for Im λ > 0, `Lower` for Im λ < 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    pub fn sigma(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }

    pub fn of(im: f64) -> Branch {
        if im >= 0.0 {
            Branch::Upper
        } else {
            Branch::Lower
        }
    }
}

/// Euler Γ. Lanczos approximation from `statrs`.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// 1/Γ(x), returning 0 at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Hankel symbol ⟨ν,k⟩ = Γ(1/2+ν+k)/(k! Γ(1/2+ν−k)), via the product
/// ∏_{j=1..k} (4ν² − (2j−1)²)/(4j). Depends on ν only through ν².
pub fn hankel_symbol(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    for j in 1..=k {
        let a = (2 * j - 1) as f64;
        p *= (mu - a * a) / (4 * j) as f64;
    }
    p
}
