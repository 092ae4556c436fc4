//! Experiment harness around the `adapg` solvers: JSON-configured runs,
//! trace export, bound comparison and rate classification.

pub mod bench;
pub mod config;
pub mod error;
pub mod experiment;
pub mod tools;

pub use config::{Config, Overrides};
pub use error::CliError;
pub use experiment::{run_experiment, Summary};
