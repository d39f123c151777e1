use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An eigenvalue that should be non-negative came out below the hard
    /// round-off threshold.
    #[error("numerical positivity violated in {context}: eigenvalue {value:e}")]
    NumericalPositivity { context: &'static str, value: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("fit domain error: {0}")]
    FitDomain(String),

    #[error("no sign change of J_{order} found near x = {near}")]
    NoSignChange { order: i32, near: f64 },

    #[error("unsupported correlation lag {0} (expected 1 or 2)")]
    UnsupportedLag(usize),

    #[error("misaligned time grids: {0}")]
    MisalignedGrids(String),

    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
