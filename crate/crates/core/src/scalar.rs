//! Scalar abstraction shared by every floating-point routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + crate::linalg::FieldElement
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    #[inline]
    fn of_i64(n: i64) -> Self {
        <Self as FromPrimitive>::from_i64(n).expect("integer representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Round to nearest integer, returned as `i64`.
    #[inline]
    fn round_i64(self) -> i64 {
        ToPrimitive::to_i64(&self.round()).unwrap_or(0)
    }

    #[inline]
    fn floor_i64(self) -> i64 {
        ToPrimitive::to_i64(&self.floor()).unwrap_or(0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `sin(2πx)` with exact values at multiples of 1/4.
///
/// The argument is reduced to a quarter-period remainder before calling the
/// platform `sin`/`cos`, so `sin_2pi(0.5) == 0` and `cos_2pi(0.75) == 0`
/// exactly. Invariant circles of the built-in models rely on this.
pub fn sin_2pi<T: Scalar>(x: T) -> T {
    let (quadrant, r) = quarter_reduce(x);
    let tau = T::PI() + T::PI();
    match quadrant {
        0 => (tau * r).sin(),
        1 => (tau * r).cos(),
        2 => -(tau * r).sin(),
        _ => -(tau * r).cos(),
    }
}

/// `cos(2πx)` with exact values at multiples of 1/4.
pub fn cos_2pi<T: Scalar>(x: T) -> T {
    let (quadrant, r) = quarter_reduce(x);
    let tau = T::PI() + T::PI();
    match quadrant {
        0 => (tau * r).cos(),
        1 => -(tau * r).sin(),
        2 => -(tau * r).cos(),
        _ => (tau * r).sin(),
    }
}

/// Splits `x = q/4 + r + integer` with `q ∈ {0,1,2,3}` and `|r| ≤ 1/8`.
fn quarter_reduce<T: Scalar>(x: T) -> (u8, T) {
    let four = T::lit(4.0);
    let k = (x * four).round();
    let r = x - k / four;
    let q = k.as_f64().rem_euclid(4.0) as u8;
    (q, r)
}

/// Euclidean remainder into `[0, 1)`.
#[inline]
pub fn wrap_unit<T: Scalar>(x: T) -> T {
    let y = x - x.floor();
    if y >= T::one() {
        T::zero()
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_points_are_exact() {
        assert_eq!(cos_2pi(0.25f64), 0.0);
        assert_eq!(cos_2pi(0.75f64), 0.0);
        assert_eq!(sin_2pi(0.5f64), 0.0);
        assert_eq!(sin_2pi(0.25f64), 1.0);
        assert_eq!(cos_2pi(1.0f64), 1.0);
        assert_eq!(sin_2pi(-0.25f64), -1.0);
    }

    #[test]
    fn agrees_with_libm() {
        for i in -200..200 {
            let x = i as f64 * 0.0137;
            assert!((sin_2pi(x) - (2.0 * std::f64::consts::PI * x).sin()).abs() < 1e-13);
            assert!((cos_2pi(x) - (2.0 * std::f64::consts::PI * x).cos()).abs() < 1e-13);
        }
        assert!((sin_2pi(0.1f32) - (0.2f32 * std::f32::consts::PI).sin()).abs() < 1e-6);
    }

    #[test]
    fn wrap_stays_in_unit_interval() {
        assert_eq!(wrap_unit(1.0f64), 0.0);
        assert_eq!(wrap_unit(-0.25f64), 0.75);
        assert!(wrap_unit(-1e-18f64) < 1.0);
    }
}
