use thiserror::Error;

/// Failure categories; the CLI maps these onto distinct exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Numeric,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("config error at {location}: {reason}")]
    Config { location: String, reason: String },

    #[error("singular input to the kernel at x = {x}, c = {c}")]
    SingularKernel { x: f64, c: f64 },

    #[error("non-finite intermediate while applying D_x at x = {x}, c = {c}")]
    NonFinite { x: f64, c: f64 },

    #[error("quadrature did not converge: achieved error {achieved:e} > requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("no fit: {0}")]
    NoFit(String),

    #[error("non-monotone CDF between {lo} and {hi}")]
    NonMonotoneCdf { lo: f64, hi: f64 },

    #[error("malformed input at row {row}: {reason}")]
    Parse { row: usize, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Invalid { .. } | Error::Config { .. } | Error::Parse { .. } => {
                ErrorCategory::Validation
            }
            Error::Io { .. } => ErrorCategory::Io,
            _ => ErrorCategory::Numeric,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
