use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must live on the same set of rows do not.
    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("duplicate column name `{0}`")]
    NameCollision(String),

    #[error("dataset has no rows")]
    EmptyDataset,

    #[error("invalid row weights: {0}")]
    InvalidWeights(String),

    /// Entropic ratio requested for two constant variables (0/0).
    #[error("entropic ratio undefined: both variables have zero entropy")]
    UndefinedRatio,

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
