use thiserror::Error;

/// Errors raised by the release engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("update budget exhausted after {updates} updates")]
    BudgetExhausted { updates: u64 },

    #[error("declared query count k = {k} already answered")]
    QueryLimit { k: usize },

    #[error("toy-scale cap exceeded: {0}")]
    ToyScaleCap(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("distinguisher contract violated: {0}")]
    Contract(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
