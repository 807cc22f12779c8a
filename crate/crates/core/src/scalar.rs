//! Scalar abstraction. Model math is generic over the floating type so the
//! same code runs in `f32` or `f64`; concrete aliases live at the crate root.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + core::fmt::Debug + 'static {
    /// Converts an `f64` literal into this scalar (rounding for `f32`).
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal")
    }

    /// Widens to `f64` for diagnostics and error payloads.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Float + FromPrimitive + core::fmt::Debug + 'static {}
