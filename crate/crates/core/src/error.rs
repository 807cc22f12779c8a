//! Error type shared by all model and calibration routines.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Domain, fit and data errors. Payloads are widened to `f64` so the enum
/// stays non-generic regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("relative pressure {0} outside [0, 1)")]
    RelativePressure(f64),

    #[error("{name} must lie strictly inside (0, 1), got {value}")]
    OpenUnitInterval { name: &'static str, value: f64 },

    #[error("{name} is not finite: {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("wet and dry permittivities coincide ({0}); morphology exponent undefined")]
    DegenerateRatio(f64),

    #[error("BET line fit is non-physical (intercept {intercept}, slope {slope})")]
    NonPhysicalFit { intercept: f64, slope: f64 },

    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("band contains no spread in the abscissa; slope undefined")]
    DegenerateBand,

    #[error("fill state has {state} bins but the distribution has {psd}")]
    BinCountMismatch { state: usize, psd: usize },

    #[error("objective is not finite at the initial parameters")]
    NonFiniteObjective,

    #[error("unknown fit parameter {0:?}")]
    UnknownParameter(String),

    #[error("invalid bounds for {name:?}: initial {initial} in [{lower}, {upper}]")]
    InvalidBounds {
        name: String,
        initial: f64,
        lower: f64,
        upper: f64,
    },
}
