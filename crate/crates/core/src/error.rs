use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("matrix has positive determinant {0:e}; no symmetric rank-one factorization exists")]
    PositiveDeterminant(f64),

    #[error("direction is not a unit vector (|d| = {0})")]
    NonUnitDirection(f64),

    #[error("degenerate simplex (|det| = {0:e})")]
    DegenerateCell(f64),

    #[error("face has affine dimension {found}, expected {expected}")]
    NotCodimensionOne { expected: usize, found: usize },

    #[error("subdivisions per axis must be positive")]
    ZeroSubdivisions,

    #[error("non-finite value in input")]
    NonFinite,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid field specification: {0}")]
    InvalidField(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dims(expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            expected: expected.into(),
            found: found.into(),
        }
    }
}
