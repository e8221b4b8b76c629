use thiserror::Error;

/// Errors shared by the scalar, matrix, algebra and classification layers.
#[derive(Debug, Error)]
pub enum EvoderError {
    #[error("division by zero")]
    DivisionByZero,

    #[error("scalars extend the base field by incompatible square roots ({left} vs {right})")]
    RadicandMismatch { left: String, right: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation requires matrix rank {expected}, but rank is {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("permutation search is capped at n = {max} (set EVODER_MAX_N to raise it); matrix has n = {n}")]
    ExplicitLimit { n: usize, max: usize },

    #[error("malformed scalar {text:?} at row {row}, column {col}: {reason}")]
    MalformedScalar {
        text: String,
        row: usize,
        col: usize,
        reason: String,
    },

    #[error("matrix is not square: declared size {n}, row {row} has {len} entries")]
    NonSquare { n: usize, row: usize, len: usize },

    #[error("matrix is empty; dimension must be at least 1")]
    EmptyMatrix,

    #[error("unsupported generator case {0:?}")]
    UnsupportedCase(String),

    #[error("dimension {n} is too small for generator case {case:?} (minimum {min})")]
    DimensionTooSmall { case: String, n: usize, min: usize },

    #[error("classification does not match the matrix: {0}")]
    PatternMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, EvoderError>;
