use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not unitary (max |U^dag U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("enumeration budget exceeded: {required} > {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{0} is undefined for this dataset")]
    UndefinedMoment(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: corrupt record: {message}")]
    CorruptRecord { line: usize, message: String },

    #[error("unitary reference {reference} not found at {}", path.display())]
    MissingUnitary { reference: String, path: PathBuf },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
