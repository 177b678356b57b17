//! Scalar abstraction for the numeric kernel.
//!
//! Label values, threshold parameters, and stack indices are generic over
//! [`Real`] so the same code drives f64 (default) and f32 lanes. Cost algebra
//! lives one rung lower ([`num_traits::Num`]) so it also instantiates with
//! exact rationals; see `cost::induction_normalize`.

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable for labels, probabilities, and estimators.
pub trait Real: Float + FromPrimitive + ToPrimitive + Copy + Send + Sync + 'static {
    /// Lossy conversion from the canonical f64 sampling lane.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts")
    }
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
