use std::path::PathBuf;

use thiserror::Error;

/// Fatal pipeline errors. Each class maps to its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema: {0}")]
    Schema(String),
    #[error("{0}")]
    Contract(String),
    #[error("fit: {0}")]
    Fit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Schema(_) => 4,
            CliError::Contract(_) => 5,
            CliError::Fit(_) => 6,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<sentitrend_core::Error> for CliError {
    fn from(e: sentitrend_core::Error) -> Self {
        if e.is_contract_violation() {
            CliError::Contract(e.to_string())
        } else {
            CliError::Fit(e.to_string())
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
