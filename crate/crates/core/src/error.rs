use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied arguments that violate an operation's preconditions.
    #[error("invalid input: {0}")]
    Input(String),

    /// A model or trainer could not produce valid distributions.
    #[error("construction failed: {0}")]
    Construction(String),

    /// `max(0, p - q)` is identically zero; sample from `p` instead.
    #[error("degenerate residual: target and draft distributions coincide")]
    DegenerateResidual,

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("reports are not comparable: {0}")]
    Comparison(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code: 1 usage, 2 I/O, 3 numeric or validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 1,
            Error::Io { .. } | Error::Csv(_) => 2,
            Error::Construction(_)
            | Error::DegenerateResidual
            | Error::Numeric(_)
            | Error::Comparison(_)
            | Error::Parse { .. }
            | Error::Json(_) => 3,
        }
    }
}
