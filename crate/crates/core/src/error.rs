use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}:{line}: {message}")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("structure: {0}")]
    Structure(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("feature extraction: {0}")]
    Extraction(String),

    #[error("solver: {0}")]
    Solver(String),

    #[error("config: {0}")]
    Config(String),

    #[error("initialization: {0}")]
    Initialization(String),

    #[error("model layout mismatch: expected {expected}, found {found}")]
    Layout { expected: String, found: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    /// Short machine-readable category used on the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Structure(_) => "structure",
            Error::Io { .. } => "io",
            Error::Validation(_) => "validation",
            Error::Extraction(_) => "extraction",
            Error::Solver(_) => "solver",
            Error::Config(_) => "config",
            Error::Initialization(_) => "initialization",
            Error::Layout { .. } => "layout",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
