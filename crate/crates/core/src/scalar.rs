//! Scalar abstraction shared by every numerical routine in the crate.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + Sum
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in the scalar type")
}

#[inline]
pub(crate) fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("index representable in the scalar type")
}

/// Lossy view used when reporting values inside error messages.
#[inline]
pub(crate) fn report<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
