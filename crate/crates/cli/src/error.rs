use thiserror::Error;

/// Failures mapped onto process exit codes: 1 for I/O, 2 for bad configuration.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0:#}")]
    Io(anyhow::Error),
    #[error("{0:#}")]
    Config(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
        }
    }

    pub fn io(e: impl Into<anyhow::Error>) -> Self {
        CliError::Io(e.into())
    }

    pub fn config(e: impl Into<anyhow::Error>) -> Self {
        CliError::Config(e.into())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
