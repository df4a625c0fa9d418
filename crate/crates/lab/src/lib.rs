//! Std companion to `fejer-core`: grid and report file formats, a shared
//! kernel memo, the experiment harness and the `fejer` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod memo;
pub mod report;
pub mod verify;

pub use config::RunConfig;
pub use error::{LabError, LabResult};
pub use memo::KernelMemo;
pub use report::{ExperimentReport, Status};

/// Version of the JSON/CSV layouts written by this crate.
pub const SCHEMA_VERSION: u32 = 1;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
