use std::process::ExitCode;

use walkrank_core::Error as CoreError;

/// Errors classified by exit code: configuration problems (2), bad or
/// missing data (3), internal faults (4).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Data(_) => ExitCode::from(3),
            CliError::Internal(_) => ExitCode::from(4),
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::InvalidConfig(_) => CliError::Config(err.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

/// IO failures while touching a named file.
pub fn io_err(path: &std::path::Path, err: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {err}", path.display()))
}
