//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 32 significant digits. Only the operations needed by the Bessel
//! series and the imaginary-axis ratios are provided.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };
    /// π to double-double precision.
    pub const PI: DD = DD {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };

    #[inline]
    pub const fn new(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> DD {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> DD {
        if self.hi <= 0.0 {
            return DD::ZERO;
        }
        // one Newton correction on the f64 root
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, r);
        DD { hi, lo }
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: i32) -> DD {
        if n == 0 {
            return DD::ONE;
        }
        let mut base = if n < 0 { DD::ONE / self } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = DD::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> DD {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        DD { hi, lo }
    }
}

impl From<f64> for DD {
    fn from(x: f64) -> DD {
        DD::new(x)
    }
}

impl fmt::Display for DD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}

impl PartialOrd for DD {
    fn partial_cmp(&self, other: &DD) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for DD {
    type Output = DD;
    #[inline]
    fn neg(self) -> DD {
        DD {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DD {
    type Output = DD;
    #[inline]
    fn add(self, b: DD) -> DD {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DD { hi, lo }
    }
}

impl Add<f64> for DD {
    type Output = DD;
    #[inline]
    fn add(self, b: f64) -> DD {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        DD { hi, lo }
    }
}

impl Sub for DD {
    type Output = DD;
    #[inline]
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Sub<f64> for DD {
    type Output = DD;
    #[inline]
    fn sub(self, b: f64) -> DD {
        self + (-b)
    }
}

impl Mul for DD {
    type Output = DD;
    #[inline]
    fn mul(self, b: DD) -> DD {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DD { hi, lo }
    }
}

impl Mul<f64> for DD {
    type Output = DD;
    #[inline]
    fn mul(self, b: f64) -> DD {
        self.mul_f64(b)
    }
}

impl Div for DD {
    type Output = DD;
    #[inline]
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + q3
    }
}

impl Div<f64> for DD {
    type Output = DD;
    #[inline]
    fn div(self, b: f64) -> DD {
        self / DD::new(b)
    }
}

impl Rem for DD {
    type Output = DD;
    fn rem(self, b: DD) -> DD {
        let q = (self / b).to_f64().trunc();
        self - b * DD::new(q)
    }
}

impl AddAssign for DD {
    #[inline]
    fn add_assign(&mut self, b: DD) {
        *self = *self + b;
    }
}

impl SubAssign for DD {
    #[inline]
    fn sub_assign(&mut self, b: DD) {
        *self = *self - b;
    }
}

impl MulAssign for DD {
    #[inline]
    fn mul_assign(&mut self, b: DD) {
        *self = *self * b;
    }
}

impl Zero for DD {
    fn zero() -> DD {
        DD::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DD {
    fn one() -> DD {
        DD::ONE
    }
}

impl Num for DD {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<DD, Self::FromStrRadixErr> {
        s.parse::<f64>().map(DD::new)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_times_three_is_one() {
        let t = DD::ONE / DD::new(3.0);
        assert!(t.lo != 0.0);
        let r = t * DD::new(3.0) - DD::ONE;
        assert!(r.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_two_squared() {
        let s = DD::new(2.0).sqrt();
        let r = s * s - DD::new(2.0);
        assert!(r.to_f64().abs() < 1e-31);
    }

    #[test]
    fn cancellation_is_tracked() {
        let a = DD::new(1.0) + DD::new(1e-20);
        let b = a - DD::new(1.0);
        assert!((b.to_f64() - 1e-20).abs() < 1e-36);
    }

    #[test]
    fn powi_negative() {
        let x = DD::new(1.5).powi(-3);
        let y = DD::ONE / (DD::new(1.5) * DD::new(1.5) * DD::new(1.5));
        assert!((x - y).to_f64().abs() < 1e-31);
    }
}
