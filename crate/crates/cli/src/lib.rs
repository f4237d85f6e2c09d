//! Library behind the `heatba` binary: run configuration, input loading,
//! command dispatch and the verification suite.

pub mod config;
pub mod error;
pub mod fixtures;
pub mod run;
pub mod verify;

pub use config::{Command, GridSpec, HalfPlaneChoice, RunConfig};
pub use error::{CliError, CliResult, EXIT_CONFIG, EXIT_GUARD, EXIT_VERIFY};
pub use run::{run, RunSummary};
pub use verify::{run_suite, CheckResult, SuiteResult};
