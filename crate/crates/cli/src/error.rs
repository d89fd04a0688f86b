use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Numerical(#[from] eigencond::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("interrupted")]
    Interrupted,
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 ok, 1 I/O, 2 configuration, 3 numerical failure, 4 interrupted.
    pub fn exit_code(&self) -> i32 {
        use eigencond::Error as E;
        match self {
            Self::Config(_) => 2,
            Self::Numerical(E::InvalidConfig(_) | E::InvalidModel(_) | E::InvalidLattice(_)) => 2,
            Self::Numerical(E::Io(_)) => 1,
            Self::Numerical(_) => 3,
            Self::Io { .. } => 1,
            Self::Interrupted => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
