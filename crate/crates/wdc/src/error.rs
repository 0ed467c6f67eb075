//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("regularity violation at {point:?}: min-norm subgradient {norm} below {required}")]
    RegularityViolation {
        point: Vec<f64>,
        norm: f64,
        required: f64,
    },

    #[error("sublevel set {{f <= {level}}} is not bounded inside the probe box")]
    UnboundedSublevel { level: f64 },

    #[error("auras touch weakly at {point:?} along {direction:?}")]
    WeakTouch { point: Vec<f64>, direction: Vec<f64> },

    #[error("iteration limit {0} exceeded")]
    MaxIterExceeded(usize),

    #[error("winding refinement failed: residual {residual} at loop {loop_index}")]
    RefinementFailure { loop_index: usize, residual: f64 },

    #[error("inconsistent germ data: {0}")]
    InconsistentGerm(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
