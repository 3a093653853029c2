//! Output records and CSV/JSON writers.
//!
//! The CSV schema is stable: `method,sweep_var,sweep_value,metric,value,
//! seed` plus a trailing `timestamp` metadata column. Rows are sorted
//! before writing so files are order-stable; with the timestamp column
//! dropped, identical runs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// One `(method, sweep point, metric)` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub method: String,
    pub sweep_var: String,
    pub sweep_value: f64,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
    /// Run timestamp (RFC 3339); excluded from determinism comparisons.
    pub timestamp: String,
}

impl ExperimentRow {
    fn sort_key(&self) -> (&str, &str, f64, &str, u64) {
        (
            &self.method,
            &self.sweep_var,
            self.sweep_value,
            &self.metric,
            self.seed,
        )
    }
}

/// Total order over rows so output files are stable.
pub fn sort_rows(rows: &mut [ExperimentRow]) {
    rows.sort_by(|a, b| {
        let (am, av, ax, ametric, aseed) = a.sort_key();
        let (bm, bv, bx, bmetric, bseed) = b.sort_key();
        (am, av)
            .cmp(&(bm, bv))
            .then(ax.total_cmp(&bx))
            .then(ametric.cmp(bmetric))
            .then(aseed.cmp(&bseed))
    });
}

/// Output encodings understood by the writers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Config(format!(
                "unknown output format '{other}' (expected csv or json)"
            ))),
        }
    }
}

fn check_finite(rows: &[ExperimentRow]) -> Result<(), CliError> {
    for row in rows {
        if !row.value.is_finite() || !row.sweep_value.is_finite() {
            return Err(CliError::Numerical(format!(
                "non-finite value in row {row:?}"
            )));
        }
    }
    Ok(())
}

/// Sort and write rows to `path` in the requested format.
pub fn write_rows(
    path: &Path,
    rows: &mut Vec<ExperimentRow>,
    format: OutputFormat,
) -> Result<(), CliError> {
    check_finite(rows)?;
    sort_rows(rows);
    let io_err =
        |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_path(path)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            for row in rows.iter() {
                writer
                    .serialize(row)
                    .map_err(|e| CliError::Io(format!("CSV write failed: {e}")))?;
            }
            writer.flush().map_err(io_err)?;
        }
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(rows)
                .map_err(|e| CliError::Io(format!("JSON encode failed: {e}")))?;
            let mut file = std::fs::File::create(path).map_err(io_err)?;
            file.write_all(text.as_bytes()).map_err(io_err)?;
            file.write_all(b"\n").map_err(io_err)?;
        }
    }
    Ok(())
}
