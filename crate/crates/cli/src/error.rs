use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("solver failure: {0}")]
    Solver(rnd_core::Error),

    #[error("calibration unreachable: {0}")]
    Calibration(rnd_core::Error),

    #[error("verification failed: {0}")]
    Verify(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn config(key: &str, reason: impl std::fmt::Display) -> Self {
        Self::Config(format!("`{key}`: {reason}"))
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Calibration(_) => 4,
            CliError::Verify(_) => 5,
        }
    }

    pub fn to_exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

impl From<rnd_core::Error> for CliError {
    fn from(e: rnd_core::Error) -> Self {
        use rnd_core::Error as E;
        match e {
            E::CalibrationOutOfRange { .. } | E::NonMonotoneLoss { .. } => CliError::Calibration(e),
            E::InvalidParameter { .. } | E::LockOutOfRange { .. } | E::UnknownAxis(_) | E::InvalidGrid(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Solver(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
