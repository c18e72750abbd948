//! On-disk artifact shapes. Every command writes a `manifest.json` capturing
//! the resolved configuration, seeds, and output list; `wall_clock_seconds`
//! is the only field that differs between two runs of the same seed.

use crate::error::{CliError, CliResult};
use drlr::data::Standardizer;
use drlr::solver::TrainedModel;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub command: String,
    pub version: String,
    pub seed: u64,
    /// 0 means the library picked the thread count.
    pub threads: usize,
    pub wall_clock_seconds: f64,
}

/// Output of `drlr train`: the fitted model plus enough context to reuse it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainArtifact {
    pub run: RunInfo,
    /// classical | regularized | robust
    pub mode: String,
    pub data_path: String,
    /// Present when training standardized the features; `drlr risk` replays
    /// it so the model and the data stay in the same coordinates.
    pub standardizer: Option<Standardizer>,
    pub model: TrainedModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub run: RunInfo,
    /// Resolved settings after merging flags, config file, and defaults.
    pub config: serde_json::Value,
    /// File names written next to this manifest.
    pub outputs: Vec<String>,
    /// Per-command result digest.
    pub summary: serde_json::Value,
}

pub fn mode_tag(epsilon: f64, kappa: drlr::types::Kappa) -> &'static str {
    if epsilon == 0.0 {
        "classical"
    } else if kappa.is_infinite() {
        "regularized"
    } else {
        "robust"
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::io(format!("cannot parse {}: {e}", path.display())))
}

/// All CSV floats use this format so artifacts are reproducible to the bit.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> CliResult<()> {
    let mut text = String::with_capacity(rows.len() * 64 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}
