//! Command-line experiment runner for geophase-core. Each experiment writes
//! one CSV dataset plus a JSON sidecar holding the resolved configuration.

pub mod config;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod output;

use std::path::PathBuf;

pub use config::{Experiment, Overrides, RunConfig};
pub use error::{CliError, Result};
pub use output::Dataset;

#[derive(Debug, Clone)]
pub struct Summary {
    pub csv: PathBuf,
    pub sidecar: PathBuf,
    pub rows: usize,
    pub warnings: Vec<String>,
}

/// Resolve the configuration (file, then flags, then defaults), run the
/// experiment and write its files.
pub fn run(experiment: Experiment, flags: Overrides) -> Result<Summary> {
    let from_file = match &flags.config {
        Some(path) => config::load_file(path)?,
        None => Overrides::default(),
    };
    let cfg = RunConfig::resolve(experiment, flags.over(from_file))?;
    let data = experiments::run(&cfg)?;
    let (csv, sidecar) = output::write(&cfg, &data)?;
    Ok(Summary { csv, sidecar, rows: data.rows.len(), warnings: data.warnings })
}
