//! Scalar abstraction for the floating-point parts of the library.
//!
//! Grid indices, wavefront distances and cluster sizes are exact integers and
//! stay concrete; everything measured in meters, radians or potential units is
//! generic over [`Real`] so the same code runs at `f32` or `f64`. The crate
//! root exports `f64` aliases for the common types.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32`, `f64`, or anything else satisfying the
/// num-traits bounds below.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + std::fmt::Debug + std::fmt::Display + 'static
{
    /// Lossy conversion from `f64`, used when a deterministic f64-defined
    /// stream (e.g. the noise generator's Gaussian draws) feeds a generic
    /// computation.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 convertible to Real scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_squares<T: Real>(xs: &[T]) -> T {
        xs.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }

    #[test]
    fn generic_math_runs_at_both_widths() {
        assert_eq!(sum_of_squares(&[1.0f32, 2.0]), 5.0f32);
        assert_eq!(sum_of_squares(&[1.0f64, 2.0]), 5.0f64);
        assert_eq!(f32::from_f64_lossy(0.5), 0.5f32);
    }
}
