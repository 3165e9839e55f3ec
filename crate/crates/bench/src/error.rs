use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] rankaccess_core::Error),
}

impl BenchError {
    /// Process exit status: 2 for caller mistakes, 3 for bad data.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 2,
            BenchError::Core(rankaccess_core::Error::Usage(_)) => 2,
            BenchError::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => 2,
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        BenchError::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

pub(crate) fn usage(msg: impl Into<String>) -> BenchError {
    BenchError::Usage(msg.into())
}

pub(crate) fn data(msg: impl Into<String>) -> BenchError {
    BenchError::Data(msg.into())
}
