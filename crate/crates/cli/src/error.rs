//! CLI error type with the stage name attached and a stable exit-code
//! mapping: 2 configuration error, 3 input parse error, 4 empty-result
//! degenerate case, 1 anything else.

use std::fmt;
use std::io;

use corpora_core::ingest::ParseError;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Parse { stage: &'static str, source: ParseError },
    Degenerate { stage: &'static str, message: String },
    Io { context: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Parse { .. } => 3,
            CliError::Degenerate { .. } => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(message) => write!(f, "configuration error: {message}"),
            CliError::Parse { stage, source } => write!(f, "stage {stage}: {source}"),
            CliError::Degenerate { stage, message } => write!(f, "stage {stage}: {message}"),
            CliError::Io { context, source } => write!(f, "{context}: {source}"),
        }
    }
}

impl std::error::Error for CliError {}
