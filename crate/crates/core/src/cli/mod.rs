//! Job configuration, pipeline orchestration and JSON reports for the
//! command-line front end.
//!
//! Exit codes: 0 pass, 1 validation or check failure, 2 parse or I/O error,
//! 3 internal identity violation.

mod config;
mod report;
mod run;

pub use config::{BaseKind, BaseSpec, ExplicitSpec, JobConfig, ModeName, PoissonSpec};
pub use report::{ConnectionSummary, Report, Residual, StarJson};
pub use run::{
    check_job, cmd_check, cmd_quantize, cmd_star, cmd_validate, quantize_job, star_job, validate,
    Options, Suite,
};

use thiserror::Error;

use crate::diagnostics::Check;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("I/O error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("identity violated: {}: {}", .0.name, .0.detail)]
    Invariant(Check),
    #[error("precision exhausted: {}: {}", .0.name, .0.detail)]
    Undetermined(Check),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Validation(_) => 1,
            CliError::Invariant(_) | CliError::Undetermined(_) => 3,
        }
    }
}
