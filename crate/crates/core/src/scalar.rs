//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the solvers are generic over (`f32` or `f64`).
///
/// Method calls such as `sqrt` or `abs` resolve through [`RealField`]; the
/// num-traits bounds supply literal conversion and constants.
pub trait Real:
    RealField
    + Copy
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Debug
    + Display
    + std::fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon.
    fn eps() -> Self;

    fn nan() -> Self;

    /// Lossy conversion to `f64` for reporting and table lookups.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance `tol` floored at a few hundred ulps so `f32` checks stay meaningful.
    fn tol(tol: f64) -> Self {
        let floor = 256.0 * Self::eps().to_f64_lossy();
        lit(tol.max(floor))
    }
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }

    fn nan() -> Self {
        f32::NAN
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }

    fn nan() -> Self {
        f64::NAN
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable")
}
