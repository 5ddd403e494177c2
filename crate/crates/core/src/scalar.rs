//! Scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the core math is written against (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Converts a count or index into `Self`.
    #[inline]
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable in scalar type")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
}

/// `|x|^p` with fast paths for the exponents the tables use.
#[inline]
pub fn abs_pow<T: Real>(x: T, p: T) -> T {
    let a = x.abs();
    if p == T::one() {
        a
    } else if p == T::lit(2.0) {
        a * a
    } else if p == T::lit(3.0) {
        a * a * a
    } else {
        a.powf(p)
    }
}

/// Derivative of `|x|^p`, i.e. `p sgn(x) |x|^(p-1)`.
#[inline]
pub fn abs_pow_derivative<T: Real>(x: T, p: T) -> T {
    if x == T::zero() {
        return T::zero();
    }
    let s = if x > T::zero() { T::one() } else { -T::one() };
    s * p * abs_pow(x, p - T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_pow_matches_powf() {
        for &x in &[-2.5_f64, -1.0, 0.0, 0.3, 4.0] {
            for &p in &[1.0_f64, 1.5, 2.0, 3.0, 4.25] {
                let want = x.abs().powf(p);
                assert!((abs_pow(x, p) - want).abs() <= 1e-12 * want.max(1.0));
            }
        }
    }

    #[test]
    fn derivative_sign() {
        assert_eq!(abs_pow_derivative(-2.0_f64, 2.0), -4.0);
        assert_eq!(abs_pow_derivative(2.0_f64, 3.0), 12.0);
        assert_eq!(abs_pow_derivative(0.0_f64, 1.0), 0.0);
        assert_eq!(abs_pow_derivative(-0.5_f32, 1.0), -1.0);
    }
}
