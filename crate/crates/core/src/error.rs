use thiserror::Error;

/// Errors shared by the data, generator, and baseline modules.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse failure at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("non-uniform timestamp at row {row}")]
    NonUniformTimestamp { row: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("degenerate series")]
    DegenerateSeries,

    #[error("series too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error("singular autocovariance system: {0}")]
    Singular(String),

    #[error("non-stationary AR solution: {0}")]
    NonStationary(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
