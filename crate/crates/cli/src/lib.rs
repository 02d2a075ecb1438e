//! Config parsing, experiment orchestration and CSV/SVG output for the `finsmooth` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, CliError, Command, Outcome};
pub use config::{ConfigError, ExperimentConfig};
