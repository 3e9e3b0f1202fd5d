use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DdmError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite observation at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("probability {0} outside the open interval (0, 1)")]
    InvalidProbability(f64),

    #[error("significance level {0} outside (0, 1/2)")]
    InvalidZeta(f64),

    #[error("threshold {0} outside the open interval (0, 1)")]
    InvalidThreshold(f64),

    #[error("need at least {min} Monte Carlo samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("sparsity {s} exceeds dimension {n}")]
    SparsityExceedsDimension { s: usize, n: usize },

    #[error("beta-min constant K = {k} must exceed 2 + a = {bound}")]
    BetaMinHypothesis { k: f64, bound: f64 },

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, DdmError>;
