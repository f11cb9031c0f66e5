//! Error-to-exit-code mapping.

use std::fmt;

pub type ExitCode = i32;

/// A command failure, classified by the documented exit-status contract.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: unreadable/invalid model, unknown names, bad flags. Exit 2.
    Input(anyhow::Error),
    /// A resource budget refused the computation. Exit 3.
    Budget(String),
    /// Anything else (IO on output, internal invariant failures). Exit 1.
    Internal(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Internal(_) => 1,
        }
    }

    pub fn input(e: impl Into<anyhow::Error>) -> Self {
        CliError::Input(e.into())
    }

    pub fn internal(e: impl Into<anyhow::Error>) -> Self {
        CliError::Internal(e.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "{e:#}"),
            CliError::Budget(s) => write!(f, "{s}"),
            CliError::Internal(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for CliError {}
