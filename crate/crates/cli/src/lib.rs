//! `recordlab` harness: experiment orchestration, deterministic parallel
//! execution, and CSV/JSON emission for the verification suites.

pub mod commands;
pub mod config;
pub mod exec;
pub mod report;

pub use commands::{run, CliError, RunOutput, Subcommand};
pub use config::{parse_args, AGrid, SimConfig, UsageError};
pub use report::{PassState, ReportRow};
