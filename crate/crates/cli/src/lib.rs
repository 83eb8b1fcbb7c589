//! Command-line front end over `dsmt-core`: problem files in, tables or JSON out.

pub mod commands;
pub mod problem;
pub mod render;

use dsmt_core::fusion::Rule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone)]
pub struct Options {
    pub rule: Rule,
    pub format: Format,
    /// A label such as `L1`; qualitative problems only.
    pub quasi_normalize: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: exit code 1.
    #[error("{0}")]
    Invalid(String),
    /// The rule is undefined on this input: exit code 2. `partial` holds
    /// whatever output was produced before the failure.
    #[error("{message}")]
    Undefined { message: String, partial: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Undefined { .. } => 2,
        }
    }
}
