use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] freebeta_core::Error),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::VerifyFailed(_) => 3,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}
