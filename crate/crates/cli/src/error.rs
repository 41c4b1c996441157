use std::path::{Path, PathBuf};

use thiserror::Error;

/// Process exit codes.
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SCHEMA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{flag}: {message}")]
    Usage { flag: String, message: String },

    #[error("{}: schema error at {pointer:?}: {message}", file.display())]
    Schema {
        file: PathBuf,
        pointer: String,
        message: String,
    },

    #[error("{0}")]
    Numerical(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn usage(flag: &str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag: flag.to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => EXIT_USAGE,
            CliError::Schema { .. } => EXIT_SCHEMA,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io { .. } | CliError::Csv(_) => EXIT_IO,
        }
    }

    /// Attach a library error to the flag or file it came from.
    pub fn from_lib(context: &str, e: fiberqm::Error) -> Self {
        use fiberqm::Error as E;
        match e {
            E::ZeroState | E::BasisMismatch(_) => CliError::Numerical(format!("{context}: {e}")),
            E::Schema { pointer, message } => CliError::Schema {
                file: PathBuf::from(context),
                pointer,
                message,
            },
            other => CliError::usage(context, other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
