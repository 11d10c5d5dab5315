use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

/// Outcome class of one verb invocation; each maps to a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error,
    ConfigError,
    HypothesisRefused,
    StepFailure,
    ChecksFailed,
    StrictWarnings,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Error => 1,
            Status::ConfigError => 2,
            Status::HypothesisRefused => 3,
            Status::StepFailure => 4,
            Status::ChecksFailed => 5,
            Status::StrictWarnings => 6,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Error => "error",
            Status::ConfigError => "config_error",
            Status::HypothesisRefused => "hypothesis_refused",
            Status::StepFailure => "step_failure",
            Status::ChecksFailed => "checks_failed",
            Status::StrictWarnings => "strict_warnings",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            Status::Ok,
            Status::Error,
            Status::ConfigError,
            Status::HypothesisRefused,
            Status::StepFailure,
            Status::ChecksFailed,
            Status::StrictWarnings,
        ]
        .into_iter()
        .find(|s| s.as_str() == name)
    }
}

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: std::io::Error },
    Config(String),
    Core(blowup_core::Error),
    Csv(csv::Error),
    Json(serde_json::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Status a failed invocation reports.
    pub fn status(&self) -> Status {
        match self {
            CliError::Config(_) => Status::ConfigError,
            CliError::Core(blowup_core::Error::HypothesisRefused { .. }) => Status::HypothesisRefused,
            CliError::Core(blowup_core::Error::StepFailure { .. }) => Status::StepFailure,
            _ => Status::Error,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Config(_) => "config",
            CliError::Core(_) => "numerics",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Csv(e) => write!(f, "csv: {e}"),
            CliError::Json(e) => write!(f, "json: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<blowup_core::Error> for CliError {
    fn from(e: blowup_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
