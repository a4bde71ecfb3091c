use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("empty signal")]
    EmptySignal,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("signal too short: need {needed} samples, have {available}")]
    TooShort { needed: usize, available: usize },

    #[error("invalid wav")]
    Wav(#[from] hound::Error),

    #[error("invalid json")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by bad inputs (files, arguments) rather than
    /// the environment.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            Error::Wav(hound::Error::IoError(_)) => false,
            _ => true,
        }
    }
}
