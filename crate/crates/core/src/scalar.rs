//! Scalar abstraction shared by the numerical modules.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar used by the geometry kernels: `f32` or `f64`.
///
/// All tolerances in this crate are specified as `f64` and converted with
/// [`lit`]; the default tolerances assume double precision.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the scalar type.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Lossy conversion back to `f64`, used for reporting and tolerance checks.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
