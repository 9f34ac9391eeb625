//! Experiment harness: JSON configs in, CSV tables and a markdown summary out.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{ExperimentConfig, ExperimentKind, Format};
pub use error::CliError;
pub use experiments::{run, Options};
pub use report::Report;
