//! Front end for the `pdp` binary: instance files, commands and reports.

pub mod commands;
pub mod document;
pub mod report;

pub use commands::{run, Cli, Command, Outcome};
pub use document::{parse_instance, Instance, InstanceDocument, Loaded};
pub use report::ResultDocument;

/// Anything that stops a command before it produces a report. All of these
/// exit with status 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("guard exceeded at `{path}`: {message}")]
    Guard { path: String, message: String },
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    /// Wraps a solver error raised while handling `path`.
    pub fn solver(path: impl Into<String>, e: pdp_core::Error) -> Self {
        let path = path.into();
        let message = e.to_string();
        match e {
            pdp_core::Error::GuardExceeded(_) | pdp_core::Error::TooLarge { .. } => CliError::Guard { path, message },
            _ => CliError::Schema { path, message },
        }
    }

    pub fn exit_code(&self) -> u8 {
        2
    }
}
