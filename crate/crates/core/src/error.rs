use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point is not inside the unit ball (norm {norm})")]
    NotInBall { norm: f64 },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("gyrovector has (near) zero length; angle is undefined")]
    ZeroGyrovector,

    #[error("tangent vector is not attached to the given base point")]
    BaseMismatch,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("only {found} of the {side} definitional words are in the vocabulary (need at least 2)")]
    InsufficientDefinitionalWords { side: &'static str, found: usize },

    #[error("word not in vocabulary: {0}")]
    MissingWord(String),

    #[error("embedding set has no gender-specific/neutral partition")]
    MissingPartition,

    #[error("embedding set is empty")]
    EmptyEmbedding,

    #[error("invalid word {0:?}: words may not be empty or contain whitespace")]
    InvalidWord(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("association scores have zero variance; effect size is undefined")]
    DegenerateVariance,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("nothing left to evaluate after dropping out-of-vocabulary entries")]
    EmptyEvaluable,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
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
