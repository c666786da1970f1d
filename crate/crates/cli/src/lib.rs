//! Batch runner for the entanglement-transfer simulator: reads a TOML
//! experiment description, runs the pipelines and writes reports, density
//! matrix dumps and plot tables.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiment;
pub mod output;
pub mod plot;
pub mod report;

pub use config::{ConfigError, Diagnostic, ExperimentConfig};
pub use experiment::{run, run_chsh_sweep, run_custom, run_fringe_scan, run_purification, Command, RunArtifacts, RunError};
pub use output::write_artifacts;
pub use plot::emit_plot_data;
pub use report::RunReport;
