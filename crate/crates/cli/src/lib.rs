//! Command line front end: config files in, reproducible output directories out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

pub use commands::{run, Command, Outcome, RunOptions};
pub use config::RunConfig;
pub use error::CliError;
pub use output::{verify, RunManifest};
