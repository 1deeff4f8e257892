use std::path::PathBuf;

use runup_core::RunupError;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const PHYSICS: i32 = 2;
    pub const IO: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Schema {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] RunupError),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    /// A check ran to completion and did not meet its tolerance.
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn schema(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        CliError::Schema {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. }
            | CliError::Schema { .. }
            | CliError::Usage(_)
            | CliError::Json(_) => exit::IO,
            CliError::CheckFailed(_) => exit::CHECK_FAILED,
            CliError::Core(e) => match e {
                // bad input data or settings are rejected before any physics runs
                RunupError::Data(_) | RunupError::Config(_) | RunupError::InvalidParameters(_) => {
                    exit::IO
                }
                RunupError::Breaking { .. }
                | RunupError::Domain(_)
                | RunupError::OutOfRange { .. }
                | RunupError::Stability(_) => exit::PHYSICS,
            },
        }
    }

    /// Short machine-readable tag for summaries.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Schema { .. } => "schema",
            CliError::Usage(_) => "usage",
            CliError::Json(_) => "json",
            CliError::CheckFailed(_) => "check-failed",
            CliError::Core(RunupError::Breaking { .. }) => "breaking",
            CliError::Core(RunupError::Domain(_)) => "domain",
            CliError::Core(RunupError::OutOfRange { .. }) => "out-of-range",
            CliError::Core(RunupError::Stability(_)) => "stability",
            CliError::Core(RunupError::Data(_)) => "data",
            CliError::Core(RunupError::Config(_)) => "config",
            CliError::Core(RunupError::InvalidParameters(_)) => "invalid-parameters",
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
