//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZakOtfsError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("input sequence must be MN-periodic")]
    NonPeriodicInput,

    #[error("sequence window is empty")]
    EmptyWindow,

    #[error("crystallization condition violated: {0}")]
    CrystallizationViolated(String),

    #[error("tap support exceeds crystallization bounds: {0}")]
    SupportExceedsBounds(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("filter guard too small to reach {tol:e} tail energy")]
    GuardTooSmall { tol: f64 },

    #[error("signal window overflow: {0}")]
    WindowOverflow(String),

    #[error("matrix factorization failed: {0}")]
    FactorizationFailed(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, ZakOtfsError>;
