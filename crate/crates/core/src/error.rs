use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants fall into two families: problems with the supplied data or
/// configuration ([`Error::is_input_error`]) and numerical failures raised
/// while fitting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{kind} count at index {index} is zero; counts must be positive")]
    ZeroCount { kind: &'static str, index: usize },

    #[error("matrix has no defined entries, so no rank scale exists")]
    NoDefinedEntries,

    #[error("{path}: row {row}, column {column}: {message}")]
    Parse {
        path: String,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("requested {requested} dimensions but only {available} are available")]
    DimensionTooLarge { requested: usize, available: usize },

    #[error("spectrum is identically zero; there is no variance to explain")]
    ZeroSpectrum,

    #[error("invalid archetypoid selection: {0}")]
    InvalidSelection(String),

    #[error(
        "exhaustive search needs {combinations} subsets, above the budget of {budget} \
         (raise it with --budget or choose a smaller k)"
    )]
    BudgetExceeded { combinations: u128, budget: u128 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the failure is caused by the supplied data or configuration
    /// rather than by a numerical routine.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Numerical(_) | Error::ZeroSpectrum)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
