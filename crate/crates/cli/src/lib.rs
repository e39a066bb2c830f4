//! Command implementations behind the `suctopp` binary.

pub mod bench;
pub mod commands;
pub mod config;
pub mod error;

pub use commands::RunContext;
pub use config::Scenario;
pub use error::CliError;
