use std::path::PathBuf;

use thiserror::Error;

/// Failures of one CLI invocation, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Schema(String),

    #[error("{0}")]
    Numeric(patchkit::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Configuration errors from the library are schema errors; everything else
    /// it reports happened while computing.
    pub fn from_lib(e: patchkit::Error) -> Self {
        match e {
            patchkit::Error::Config(msg) => CliError::Schema(msg),
            other => CliError::Numeric(other),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<patchkit::Error> for CliError {
    fn from(e: patchkit::Error) -> Self {
        CliError::from_lib(e)
    }
}
