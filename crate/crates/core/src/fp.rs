//! Cancellation-safe floating-point building blocks.
//!
//! The deflection angles in this problem are ~1e-5 rad riding on top of π,
//! and the orbit function is evaluated where two ~1e-15 terms cancel to
//! ~1e-25. Plain arithmetic loses exactly the digits the model is about,
//! so the few places that matter carry values as an unevaluated sum of two
//! machine numbers ([`TwoFloat`]) built from the classic error-free
//! transforms.

use std::ops::Add;

use crate::scalar::Scalar;

/// Error-free sum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e`
/// exactly.
#[inline]
pub fn two_sum<T: Scalar>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum requiring `|a| >= |b|` (or a or b zero).
#[inline]
pub fn quick_two_sum<T: Scalar>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product: returns `(p, e)` with `p = fl(a * b)` and
/// `a * b = p + e` exactly. Uses a fused multiply-add.
#[inline]
pub fn two_prod<T: Scalar>(a: T, b: T) -> (T, T) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// A value represented as the unevaluated sum `hi + lo`, `|lo| <= ulp(hi)/2`.
///
/// Only the handful of operations the orbit math needs are provided; this
/// is not a general double-double library.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoFloat<T> {
    pub hi: T,
    pub lo: T,
}

impl<T: Scalar> TwoFloat<T> {
    #[inline]
    pub fn new(hi: T, lo: T) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    #[inline]
    pub fn from_scalar(x: T) -> Self {
        Self {
            hi: x,
            lo: T::zero(),
        }
    }

    /// π to twice the native precision.
    #[inline]
    pub fn pi() -> Self {
        Self {
            hi: T::PI(),
            lo: T::PI_LO,
        }
    }

    /// Round back to a single machine number.
    #[inline]
    pub fn value(self) -> T {
        self.hi + self.lo
    }

    #[inline]
    pub fn add_scalar(self, s: T) -> Self {
        self + Self::from_scalar(s)
    }

    #[inline]
    pub fn mul_scalar(self, s: T) -> Self {
        let (p, e) = two_prod(self.hi, s);
        let e = self.lo.mul_add(s, e);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    #[inline]
    pub fn div_scalar(self, d: T) -> Self {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = ((self.hi - p) - e) + self.lo;
        let q2 = r / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }
}

impl<T: Scalar> Add for TwoFloat<T> {
    type Output = Self;

    #[inline]
    fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + (self.lo + other.lo);
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_sum_recovers_lost_bits() {
        let (s, e) = two_sum(1.0e16_f64, 1.0);
        assert_eq!(s, 1.0e16 + 1.0); // rounds away the 1.0
        assert_eq!(s + e, 1.0e16 + 1.0);
        assert_eq!(e, 1.0 - ((1.0e16 + 1.0) - 1.0e16));
    }

    #[test]
    fn two_prod_is_exact() {
        let a = 1.0 + f64::EPSILON;
        let b = 1.0 - f64::EPSILON;
        let (p, e) = two_prod(a, b);
        // a*b = 1 - eps^2; p rounds to 1, e must carry the -eps^2.
        assert_eq!(p, 1.0);
        assert_eq!(e, -f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn pi_division_carries_extra_digits() {
        // (2π)/2 in TwoFloat must round back to PI() with the low word intact.
        let two_pi = TwoFloat::<f64>::pi().mul_scalar(2.0);
        let back = two_pi.div_scalar(2.0);
        assert_eq!(back.hi, std::f64::consts::PI);
        assert_eq!(back.lo, f64::PI_LO);
    }

    proptest! {
        #[test]
        fn prop_two_sum_exact(a in -1.0e15_f64..1.0e15, b in -1.0_f64..1.0) {
            let (s, e) = two_sum(a, b);
            // s + e reproduces the rounded sum, and e is below one ulp of s.
            prop_assert_eq!(s, a + b);
            prop_assert!(e.abs() <= (s.abs() * f64::EPSILON).max(f64::MIN_POSITIVE));
        }

        #[test]
        fn prop_mul_div_roundtrip(x in 0.5_f64..2.0, d in 0.9_f64..3.5) {
            let v = TwoFloat::from_scalar(x).div_scalar(d).mul_scalar(d);
            // hi+lo recovers x to well below one ulp of working precision
            prop_assert!((v.value() - x).abs() <= 2.0 * f64::EPSILON * x);
            // and the two-word error is quadratically small
            let err = (v.hi - x) + v.lo;
            prop_assert!(err.abs() <= 4.0 * f64::EPSILON * f64::EPSILON * x);
        }
    }
}
