use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] twovec_core::Error),
    #[error("dominant eigenvalue is not separated from the next one")]
    DegenerateSpectrum,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// Process exit status: 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use twovec_core::Error as E;
        match self {
            HarnessError::Config(_) | HarnessError::Io { .. } | HarnessError::Json(_) | HarnessError::Csv(_) => 2,
            HarnessError::Core(E::NotUnit | E::CollinearObservations | E::InvalidNoiseModel) => 2,
            HarnessError::Core(_) | HarnessError::DegenerateSpectrum => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
