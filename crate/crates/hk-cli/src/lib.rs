//! Command-line harness over `hk-core`: mean reports, scene verification,
//! figure sampling, reconstruction studies, and a seeded property suite.
//!
//! The library side exists so integration tests can drive the command
//! bodies and reuse the verify generators; the `hk` binary is a thin
//! dispatcher around [`run`].

pub mod cli;
pub mod commands;
pub mod report;
pub mod signals;
pub mod verify;

pub use commands::run;
pub use report::{CliError, CliResult};
