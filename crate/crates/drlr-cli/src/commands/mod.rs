pub mod calibrate;
pub mod experiment;
pub mod generate;
pub mod risk;
pub mod train;

use crate::artifacts::RunInfo;
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};
use drlr::data::{load_csv, ColumnRef, CsvSchema};
use drlr::Dataset;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Resolved globals shared by every command.
pub struct Ctx {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub threads: usize,
    pub cfg: FileConfig,
    pub started: Instant,
}

impl Ctx {
    pub fn run_info(&self, command: &str) -> RunInfo {
        RunInfo {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
            threads: self.threads,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Loads a headerless numeric CSV; the label column defaults to the last
/// field of the first row.
pub fn load_dataset(path: &Path, label_column: Option<usize>) -> CliResult<Dataset> {
    if !path.exists() {
        return Err(CliError::io(format!(
            "dataset not found: {}",
            path.display()
        )));
    }
    let column = match label_column {
        Some(c) => c,
        None => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .ok_or_else(|| CliError::io(format!("{} is empty", path.display())))?;
            first.split(',').count() - 1
        }
    };
    let schema = CsvSchema::new(ColumnRef::Index(column));
    Ok(load_csv(path, &schema)?)
}
