use std::path::PathBuf;

use ebicsel_core::Error as CoreError;
use thiserror::Error;

/// Application-level failure, classified by exit code.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    /// 1 for usage errors, 2 for data errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) | AppError::Io { .. } => 2,
            AppError::Numerical(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::UnsupportedPair { .. }
            | CoreError::UnknownName(_)
            | CoreError::InvalidArgs(_)
            | CoreError::InvalidRho(_)
            | CoreError::InvalidDesign(_) => AppError::Usage(msg),
            CoreError::InvalidData(_)
            | CoreError::FoldTooSmall { .. }
            | CoreError::EmptyCandidates => AppError::Data(msg),
            CoreError::Domain { .. }
            | CoreError::RankDeficient { .. }
            | CoreError::PathEmpty
            | CoreError::ZeroDenominator => AppError::Numerical(msg),
        }
    }
}
