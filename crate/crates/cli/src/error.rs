use std::path::PathBuf;

use thiserror::Error;

/// Failures of a run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] heatba_core::Error),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
}

pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => EXIT_VERIFY,
            CliError::Core(e) if e.guard_name().is_some() => EXIT_GUARD,
            CliError::Config(_) | CliError::Core(_) | CliError::Io { .. } => EXIT_CONFIG,
        }
    }

    /// One-line message; guard trips lead with the guard name.
    pub fn report(&self) -> String {
        match self {
            CliError::Core(e) => match e.guard_name() {
                Some(name) => format!("numerical guard {name}: {e}"),
                None => format!("error: {e}"),
            },
            other => format!("error: {other}"),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
