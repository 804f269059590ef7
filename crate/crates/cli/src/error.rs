use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] netplan_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }

    /// 2 for anything the user can fix by changing the invocation, 3 when a
    /// computation did not converge, 1 for environmental failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) | Self::Json(_) => 2,
            Self::Core(e) if e.is_numerical() => 3,
            Self::Core(_) => 2,
            Self::Io(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
