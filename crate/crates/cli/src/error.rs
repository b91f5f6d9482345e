use std::path::PathBuf;

use tacton_sim::pipeline::PipelineError;
use tacton_sim::synthesis::SynthesisError;
use tacton_sim::ValidationError;
use thiserror::Error;

/// Failures of a CLI command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Validation {
        path: PathBuf,
        source: ValidationError,
    },
    #[error("{0}")]
    Usage(String),
    #[error("no simulation output matches measurement stem(s): {}", .0.join(", "))]
    UnmatchedStems(Vec<String>),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("could not parse: {}", .0.join("; "))]
    Parse(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } | CliError::Usage(_) | CliError::UnmatchedStems(_) => 2,
            CliError::Io(_) => 3,
            CliError::Parse(_) => 4,
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<SynthesisError> for CliError {
    fn from(e: SynthesisError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Usage(e.to_string())
    }
}
