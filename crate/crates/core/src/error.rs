use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        /// 1-based data row (the header is row 0).
        row: usize,
        column: String,
        message: String,
    },

    #[error("column '{0}' not found")]
    MissingColumn(String),

    #[error("dataset has no rows")]
    EmptyData,

    #[error("dataset has no features")]
    EmptyDataset,

    #[error("feature index {index} out of range for {len} features")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("degenerate point cloud: every point coincides with another, coverage is undefined")]
    DegenerateCloud,

    #[error("no single feature yields a defined coverage value")]
    AllDegenerate,

    #[error("{features} features exceed the exhaustive-search limit of {limit}")]
    TooManyFeatures { features: usize, limit: usize },

    #[error("grid of {m}^{k} points is too large")]
    SizeOverflow { m: usize, k: usize },

    #[error("dimension {requested} unsupported (maximum {max})")]
    UnsupportedDimension { requested: usize, max: usize },

    #[error("bad transform '{target}': {message}")]
    BadTransform { target: String, message: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("kappa undefined: chance agreement is total")]
    UndefinedKappa,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
