//! Scalar abstractions.
//!
//! Floating-point kernels (special functions, the stepper, quadrature, fits)
//! are written against [`Real`], implemented for `f32` and `f64`. The series
//! recursion at the origin only needs field operations plus a power of the
//! leading coefficient, captured by [`Field`]; that trait is also implemented
//! for exact rationals so the recursion can be checked without rounding.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Field + Debug + Display + Default + Serialize + Send + Sync + 'static
{
    /// Magnitude above which an unscaled state is treated as overflowed.
    fn overflow_limit() -> Self;
    /// Max-norm that triggers a rescale on the renormalized linear path.
    fn renorm_threshold() -> Self;
    /// Largest argument for which `exp` stays finite with some headroom.
    fn exp_arg_limit() -> Self;

    /// Converts an `f64` literal. Every literal used in this crate is
    /// representable (possibly rounded) in both `f32` and `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn from_usize_lossy(k: usize) -> Self {
        Self::from_usize(k).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn overflow_limit() -> Self {
        1e300
    }
    fn renorm_threshold() -> Self {
        1e100
    }
    fn exp_arg_limit() -> Self {
        700.0
    }
}

impl Real for f32 {
    fn overflow_limit() -> Self {
        1e36
    }
    fn renorm_threshold() -> Self {
        1e12
    }
    fn exp_arg_limit() -> Self {
        85.0
    }
}

/// Field arithmetic for truncated power series.
pub trait Field: Clone + Debug + PartialEq + Num + Neg<Output = Self> + FromPrimitive {
    /// `self^exponent`, used only for the leading coefficient of a series.
    /// Returns `None` when the power is not representable in the field
    /// (e.g. a non-integer exponent of a rational).
    fn leading_pow(&self, exponent: &Self) -> Option<Self>;

    fn is_positive(&self) -> bool;

    /// Magnitude as `f64`, used for truncation heuristics only.
    fn magnitude(&self) -> f64;
}

macro_rules! float_field {
    ($t:ty) => {
        impl Field for $t {
            fn leading_pow(&self, exponent: &Self) -> Option<Self> {
                let v = self.powf(*exponent);
                v.is_finite().then_some(v)
            }
            fn is_positive(&self) -> bool {
                *self > 0.0
            }
            fn magnitude(&self) -> f64 {
                self.abs() as f64
            }
        }
    };
}

float_field!(f32);
float_field!(f64);

impl<I> Field for Ratio<I>
where
    I: Clone + Integer + Signed + FromPrimitive + ToPrimitive + Debug,
    Ratio<I>: FromPrimitive,
{
    fn leading_pow(&self, exponent: &Self) -> Option<Self> {
        if !exponent.is_integer() {
            return None;
        }
        let e = exponent.to_integer().to_i32()?;
        if e < 0 && self.is_zero() {
            return None;
        }
        let base = if e < 0 { self.recip() } else { self.clone() };
        Some((0..e.unsigned_abs()).fold(Self::one(), |acc, _| acc * base.clone()))
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn magnitude(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        (n / d).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_powers_are_exact_for_integer_exponents() {
        let x = Ratio::new(3i64, 2);
        assert_eq!(x.leading_pow(&Ratio::from_integer(2)), Some(Ratio::new(9, 4)));
        assert_eq!(x.leading_pow(&Ratio::from_integer(-1)), Some(Ratio::new(2, 3)));
        assert_eq!(x.leading_pow(&Ratio::new(1, 2)), None);
    }

    #[test]
    fn float_literals_round_trip() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.25), 0.25f32);
        assert!(f32::overflow_limit() < f32::MAX);
    }
}
