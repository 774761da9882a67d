use thiserror::Error;

/// Errors surfaced by constructors, validators, and the distance engines.
#[derive(Debug, Error)]
pub enum QsmError {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid semi-metric: {0}")]
    InvalidSemiMetric(String),

    #[error("invalid seminorm: {0}")]
    InvalidSeminorm(String),

    #[error("invalid group action: {0}")]
    InvalidGroupAction(String),

    #[error("homomorphism not validated: {0}")]
    NotValidated(String),

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("empty probe set")]
    EmptyProbeSet,

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
}

pub type Result<T> = std::result::Result<T, QsmError>;
