//! Batch pipeline, configuration and benchmark behind the `metacat` binary.

pub mod bench;
pub mod config;
mod error;
pub mod pipeline;

pub use config::PipelineConfig;
pub use error::CliError;
pub use pipeline::{run_pipeline, RunReport};
