use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mixedopt::Error),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("unknown check suite `{0}` (known: {1})")]
    UnknownSuite(String, String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("check suite `{0}` failed")]
    CheckFailed(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Scenario(_) => "invalid-scenario",
            CliError::UnknownPreset(_) => "unknown-preset",
            CliError::UnknownSuite(..) => "unknown-suite",
            CliError::Io(_) => "io-error",
            CliError::CheckFailed(_) => "check-failed",
        }
    }

    /// Machine-readable form printed on failure.
    pub fn report(&self) -> ErrorReport {
        ErrorReport { error: ErrorBody { kind: self.kind(), message: self.to_string() } }
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

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
}
