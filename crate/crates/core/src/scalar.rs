//! Floating-point scalar abstraction for the state-vector code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar usable for amplitudes and probabilities (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance for normalization and probability-sum checks at this precision.
    const NORM_TOLERANCE: Self;

    fn from_usize_exact(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable as float")
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 representable as scalar")
    }
}

impl Scalar for f64 {
    const NORM_TOLERANCE: Self = 1e-12;
}

impl Scalar for f32 {
    const NORM_TOLERANCE: Self = 1e-5;
}
