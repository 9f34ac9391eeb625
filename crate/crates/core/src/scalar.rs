//! Floating-point scalar abstraction shared by every decomposition.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar usable by the tensor, SVD and decomposition layers.
///
/// Implemented for `f32` and `f64`. The associated thresholds are relative to
/// the largest singular value and scale with the unit roundoff of the type.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Relative level below which singular values are treated as noise.
    fn noise_floor() -> Self;

    /// Convergence threshold for Jacobi rotations.
    fn jacobi_tolerance() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits in scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::max_value)
    }
}

impl Scalar for f64 {
    fn noise_floor() -> Self {
        1e-13
    }

    fn jacobi_tolerance() -> Self {
        f64::EPSILON
    }
}

impl Scalar for f32 {
    fn noise_floor() -> Self {
        1e-6
    }

    fn jacobi_tolerance() -> Self {
        f32::EPSILON
    }
}
