//! Floating-point abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for similarities, ratios, percentages and coordinates.
///
/// Implemented for `f32` and `f64`. Counts stay integral; only derived
/// quantities are carried in `T`.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Lossless for every count this crate produces (well below 2^24 for `f32`).
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable as float")
    }

    fn hundred() -> Self {
        Self::lit(100.0)
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {}
