//! Problem-file ingestion, command dispatch and report emission for `symred`.

pub mod commands;
pub mod problem;
pub mod report;

use symred_core::error::Error;

/// Exit codes of the `symred` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const RESIDUAL: i32 = 3;
    pub const CAP: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    Field { path: String, source: Error },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let core = match self {
            CliError::Field { source, .. } | CliError::Core(source) => source,
            _ => return exit::VALIDATION,
        };
        match core {
            Error::Residual(_) => exit::RESIDUAL,
            Error::DimensionCap { .. } => exit::CAP,
            _ => exit::VALIDATION,
        }
    }
}
