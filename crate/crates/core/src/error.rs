use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data. `row` and `col` are zero-based positions in the
    /// source file when known.
    #[error("data error at row {row:?}, col {col:?}: {message}")]
    Data {
        row: Option<usize>,
        col: Option<usize>,
        message: String,
    },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("insufficient history: need {needed} periods, have {available}")]
    History { needed: usize, available: usize },

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("robust model condition violated: max predicted relative {max_pred} <= {bound}")]
    Condition { max_pred: f64, bound: f64 },

    #[error("strategy contract violated: {0}")]
    Contract(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn data(row: Option<usize>, col: Option<usize>, message: impl Into<String>) -> Self {
        Error::Data {
            row,
            col,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
