use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] pairhmm::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
}

pub type CliResult<T> = Result<T, CliError>;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// A library error raised while reading `path`.
    pub fn input(path: &Path, err: pairhmm::Error) -> Self {
        CliError::Input {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        use pairhmm::Error as E;
        match self {
            CliError::Usage(_) | CliError::Input { .. } => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Model(e) => match e {
                E::NonIrreducible
                | E::NoStationarySolution
                | E::FloorViolation { .. }
                | E::NotConverged(_)
                | E::TooLarge(_)
                | E::SizeCap { .. } => EXIT_NUMERIC,
                _ => EXIT_USAGE,
            },
        }
    }
}
