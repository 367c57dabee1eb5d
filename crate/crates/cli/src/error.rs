use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}", path = path.display())]
    Config { path: PathBuf, source: ConfigError },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] nems_entangle::error::Error),

    #[error("{path}: {source}", path = path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: impl Into<std::io::Error>) -> Self {
        CliError::Io {
            path: path.into(),
            source: source.into(),
        }
    }

    /// 1 for bad input, 2 for solver failures, 3 for I/O.
    pub fn exit_code(&self) -> u8 {
        use nems_entangle::error::Error;
        match self {
            CliError::Config { .. } | CliError::Usage(_) => 1,
            CliError::Model(Error::InvalidArgument(_) | Error::Precondition(_)) => 1,
            CliError::Model(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
