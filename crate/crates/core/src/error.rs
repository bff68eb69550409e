use std::path::PathBuf;

use crate::model::Violation;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {}", format_violations(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("normalization failed: {0}")]
    Normalization(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A search ran out of its node budget. Never silently truncated.
    #[error("{what} exceeded its budget of {limit} nodes")]
    Budget { what: &'static str, limit: u64 },

    #[error("selection and assignment are inconsistent: {0}")]
    Inconsistent(String),

    /// Local search took more steps than its potential-based guard allows.
    #[error("local search exceeded its step guard of {guard} moves")]
    StepGuard { guard: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 3,
            Error::Inconsistent(_) | Error::StepGuard { .. } => 4,
            _ => 2,
        }
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
