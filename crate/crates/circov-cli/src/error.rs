//! Error type of the harness and its machine-readable rendering.

use serde::Serialize;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// A parameter is missing, malformed or out of range for the command.
    #[error("invalid configuration: {0}")]
    Schema(String),
    /// Command-line parse failure, or a help/version request.
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Library(#[from] circov::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config file error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config serialization error: {0}")]
    TomlSer(#[from] toml::ser::Error),
}

/// JSON body written to stderr on failure.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) | CliError::Toml(_) | CliError::Usage(_) => "schema",
            CliError::Library(circov::Error::PrecisionExhausted { .. }) => "precision_exhausted",
            CliError::Library(circov::Error::InvalidInput(_)) => "invalid_input",
            CliError::Library(circov::Error::Precondition(_)) => "precondition",
            CliError::Library(circov::Error::BudgetExceeded(_)) => "budget_exceeded",
            CliError::Library(_) => "library",
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) | CliError::TomlSer(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "schema" | "invalid_input" | "precondition" => 2,
            "precision_exhausted" => 3,
            "budget_exceeded" => 4,
            _ => 1,
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport {
            kind: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        }
    }
}
