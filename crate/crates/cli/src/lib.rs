//! Command-line front end: structure-constant documents in, deterministic reports out.

pub mod analyze;
pub mod error;
pub mod input;
pub mod malcev;
pub mod oracle;
pub mod report;
pub mod selftest;

pub use error::{CliError, CliResult};
