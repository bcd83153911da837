//! Scenario runner around `robin-eit-core`: TOML configs, pipelines and
//! output files. The `robin-eit` binary is a thin shell over [`commands`].

pub mod commands;
pub mod config;
pub mod output;
pub mod pipeline;

pub use config::{Diagnostic, ScenarioConfig};
pub use pipeline::{run, RunOutput, RunReport};
