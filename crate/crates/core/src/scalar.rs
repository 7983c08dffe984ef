//! Numeric traits shared by the generic kernels.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Anything that can be added, compared and copied: capacities for max-flow.
///
/// Implemented for the primitive floats and for exact rationals.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + Debug + Send + Sync {}

/// Floating point scalar for the simplex kernel.
pub trait Real: Scalar + Float + FromPrimitive + ToPrimitive + Copy {
    /// Zero tolerance for pivots and bound checks.
    fn tolerance() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }
}

impl Real for f32 {
    fn tolerance() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

/// Converts an exact rational to the nearest float.
pub fn rational_to_f64(q: &crate::Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}
