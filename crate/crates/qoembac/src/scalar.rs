//! Scalar abstraction for the rate arithmetic.
//!
//! All estimator and model math is generic over [`Scalar`] so the same code
//! runs in `f32` or `f64`. The simulator and trace handling stay in `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable for rates, probabilities and model
/// coefficients.
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + Copy + 'static {
    /// Lossless-enough conversion from `f64` literals (thresholds, presets).
    fn from_f64_lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Conversion from a count of sessions, frames or packets.
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("count representable in scalar type")
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + Sum + Debug + Display + Copy + 'static {}
