use std::path::PathBuf;

use crate::controller::TrajectoryLog;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// The estimate cannot be mapped back to physical parameters yet.
    #[error("cannot invert proxy parameters: {channel} gain is {beta} (must be > 0)")]
    Inversion { channel: &'static str, beta: f64 },

    #[error("rollout diverged at prediction step {step}")]
    Rollout { step: usize },

    #[error("input sequence has length {got}, horizon is {expected}")]
    HorizonMismatch { expected: usize, got: usize },

    #[error("closed loop aborted at step {step}: {source}")]
    Aborted {
        step: usize,
        #[source]
        source: Box<Error>,
        partial: Box<TrajectoryLog>,
    },

    #[error("config parse error in {path}: {message}")]
    ConfigParse { path: String, message: String },

    #[error("config field `{field}`: {reason}")]
    ConfigInvalid { field: String, reason: String },

    #[error("trace {path}: row {row}, column `{column}`: {reason}")]
    Schema {
        path: String,
        row: usize,
        column: String,
        reason: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigParse { .. } | Error::ConfigInvalid { .. } | Error::Schema { .. } => 2,
            Error::Io { .. } | Error::Csv { .. } => 4,
            Error::Aborted { source, .. } => source.exit_code(),
            Error::InvalidParameter { .. } => 2,
            _ => 3,
        }
    }
}
