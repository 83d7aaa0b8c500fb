//! CLI error type with stable machine-parsable classes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Lib(#[from] betatree::Error),

    #[error("cannot parse '{value}' as a number at line {line}, column {column}")]
    Parse { line: u64, column: String, value: String },

    #[error("no columns selected: {0}")]
    EmptySelection(String),

    #[error("invalid slice axis: {0}")]
    InvalidAxis(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("cannot read CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("cannot parse document: {0}")]
    Document(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl CliError {
    pub fn class(&self) -> &'static str {
        match self {
            CliError::Lib(e) => e.class(),
            CliError::Parse { .. } => "ParseError",
            CliError::EmptySelection(_) => "EmptySelection",
            CliError::InvalidAxis(_) => "InvalidAxis",
            CliError::Io(_) => "IoError",
            CliError::Csv(_) => "ParseError",
            CliError::Document(_) => "DocumentError",
            CliError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
