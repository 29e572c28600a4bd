//! CSV tables and plain-text manifests.
//!
//! Numeric cells use a fixed exponential format so identical runs are
//! byte-identical; wall-clock columns are marked by the `_ms` suffix and
//! excluded from determinism comparisons.

use crate::config::ExperimentConfig;
use std::fmt::Write as _;
use std::path::Path;

pub fn fmt_num(v: f64) -> String {
    format!("{v:.12e}")
}

pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Deterministic merge order regardless of completion order.
    pub fn sort_rows(&mut self) {
        self.rows.sort();
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

pub struct Report {
    pub experiment: String,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.into(),
            tables: Vec::new(),
        }
    }

    pub fn write_to(&self, dir: &Path, cfg: &ExperimentConfig) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for table in &self.tables {
            std::fs::write(dir.join(format!("{}.csv", table.name)), table.to_csv())?;
        }
        std::fs::write(dir.join("manifest.txt"), manifest(&self.experiment, cfg))
    }
}

pub fn manifest(experiment: &str, cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "experiment: {experiment}");
    let _ = writeln!(out, "code_version: {}", env!("CARGO_PKG_VERSION"));
    for (k, v) in cfg.echo() {
        let _ = writeln!(out, "{k}: {v}");
    }
    out
}
