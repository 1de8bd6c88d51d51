//! Scalar abstractions.
//!
//! Everything that only needs field operations (flow right-hand sides,
//! printed curvature formulas, the Koszul oracle, closure residuals) is
//! written against [`Field`], so it runs unchanged on `f32`, `f64`,
//! exact rationals and dual numbers. Anything that needs square roots,
//! cube roots or an ODE integrator asks for [`Real`].

use std::fmt::{Debug, Display, LowerExp};
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// A scalar supporting exact field arithmetic.
pub trait Field:
    Copy + Debug + PartialOrd + Num + Neg<Output = Self> + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

impl<T> Field for T where
    T: Copy
        + Debug
        + PartialOrd
        + Num
        + Neg<Output = Self>
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// A floating point scalar: `f32` or `f64`.
pub trait Real: Field + Float + FloatConst + Display + LowerExp {}

impl<T> Real for T where T: Field + Float + FloatConst + Display + LowerExp {}

/// Small integer literal in any field.
#[inline]
pub fn int<T: Field>(n: i64) -> T {
    T::from_i64(n).expect("small integers are representable in every scalar type")
}

/// `num / den` in any field.
#[inline]
pub fn frac<T: Field>(num: i64, den: i64) -> T {
    int::<T>(num) / int::<T>(den)
}

/// Float literal for real scalars.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal fits the scalar type")
}

#[inline]
pub(crate) fn sq<T: Field>(x: T) -> T {
    x * x
}

#[inline]
pub(crate) fn to_f64<T: Field>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Largest magnitude, as `f64`; `NaN` entries propagate.
pub(crate) fn max_abs<T: Field>(xs: impl IntoIterator<Item = T>) -> f64 {
    xs.into_iter().map(|x| to_f64(x).abs()).fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}
