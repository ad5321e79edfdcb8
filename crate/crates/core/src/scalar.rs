//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra as na;
use num_traits as nt;
use std::fmt::{Debug, Display};

/// Real floating point type usable by the design formulas, the operator
/// builders and the eigensolvers. Implemented for `f32` and `f64`.
pub trait Real:
    na::RealField
    + Copy
    + Default
    + Debug
    + Display
    + nt::FromPrimitive
    + nt::ToPrimitive
    + nt::FloatConst
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Lossy for `f32`.
    fn lit(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("finite literal")
    }

    /// Converts an integer count or quantum number.
    fn from_int(n: i64) -> Self {
        <Self as nt::FromPrimitive>::from_i64(n).expect("representable integer")
    }

    fn to_f64_lossy(self) -> f64 {
        <Self as nt::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn is_finite_value(self) -> bool {
        self.to_f64_lossy().is_finite()
    }

    /// Machine epsilon of the type, as `f64`.
    const EPSILON: f64;

    fn eps() -> Self {
        Self::lit(Self::EPSILON)
    }
}

impl Real for f32 {
    const EPSILON: f64 = f32::EPSILON as f64;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;
}

/// Modulus of a complex number without requiring `num_traits::Float`.
pub fn modulus<R: Real>(z: Cplx<R>) -> R {
    z.norm_sqr().sqrt()
}

/// Complex amplitude over a [`Real`] type.
pub type Cplx<R> = num_complex::Complex<R>;
