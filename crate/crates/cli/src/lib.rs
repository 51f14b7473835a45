//! Batch front end: `verify`, `traj`, `packet` and `fw` commands writing CSV or JSON.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use commands::run;
pub use config::{Command, Flags, Format, PartialConfig, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("unsupported physics: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(zitter_core::Error),
}

impl CliError {
    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.to_path_buf(), message: err.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Unsupported(_) => EXIT_UNSUPPORTED,
            CliError::Numerical(_) => EXIT_VERIFICATION,
        }
    }
}

impl From<zitter_core::Error> for CliError {
    fn from(err: zitter_core::Error) -> Self {
        use zitter_core::Error as E;
        match err {
            E::Unsupported(msg) => CliError::Unsupported(msg),
            e @ E::DegenerateMode { .. } => CliError::Unsupported(e.to_string()),
            e @ (E::Parameter(_) | E::Shape { .. }) => CliError::Config(e.to_string()),
            E::NullNorm(n) => CliError::Config(format!(
                "the state has null charge-form norm ({n:.3e}); for GFV and ST use a mixed weight other than 0.5"
            )),
            other => CliError::Numerical(other),
        }
    }
}
