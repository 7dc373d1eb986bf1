//! CSV datasets with a JSON sidecar describing how they were produced.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    /// Floats carry 17 significant digits so they round-trip exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(v) if v.is_nan() => "NaN".to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Non-fatal problems worth reporting, such as states that failed the
    /// positivity check.
    pub warnings: Vec<String>,
}

impl Dataset {
    pub fn new(columns: &[&'static str]) -> Self {
        Dataset { columns: columns.to_vec(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema_version: u32,
    generator: String,
    experiment: &'static str,
    columns: &'a [&'static str],
    rows: usize,
    warnings: &'a [String],
    config: &'a RunConfig,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn write(config: &RunConfig, data: &Dataset) -> Result<(PathBuf, PathBuf)> {
    let csv_path = config.output.clone();
    let csv_err = |source| CliError::Csv { path: csv_path.clone(), source };
    let file = File::create(&csv_path).map_err(io_err(&csv_path))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
    w.write_record(&data.columns).map_err(csv_err)?;
    for row in &data.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&csv_path))?;

    let json_path = sidecar_path(&csv_path);
    let sidecar = Sidecar {
        schema_version: SCHEMA_VERSION,
        generator: format!("geophase {}", env!("CARGO_PKG_VERSION")),
        experiment: config.experiment.name(),
        columns: &data.columns,
        rows: data.rows.len(),
        warnings: &data.warnings,
        config,
    };
    let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    text.push('\n');
    let mut f = File::create(&json_path).map_err(io_err(&json_path))?;
    f.write_all(text.as_bytes()).map_err(io_err(&json_path))?;
    Ok((csv_path, json_path))
}
