//! Tabular results and their CSV / JSON serialization.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::CliError;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(i64),
    Text(String),
    Float(f64),
    Missing,
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Text(s) => s.clone(),
            Field::Float(v) => format!("{v:.16e}"),
            Field::Missing => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Field::Float(v) => Some(*v),
            Field::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

/// A row: key columns, value columns and an optional per-row error.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub key: Vec<Field>,
    pub values: Vec<Field>,
    pub error: Option<String>,
}

impl Row {
    pub fn ok(key: Vec<Field>, values: Vec<Field>) -> Self {
        Self { key, values, error: None }
    }

    pub fn failed(key: Vec<Field>, width: usize, error: impl ToString) -> Self {
        Self { key, values: vec![Field::Missing; width], error: Some(error.to_string()) }
    }

    pub fn value(&self, i: usize) -> Option<f64> {
        self.values.get(i).and_then(Field::as_f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub key_columns: Vec<&'static str>,
    pub value_columns: Vec<&'static str>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(key_columns: &[&'static str], value_columns: &[&'static str]) -> Self {
        Self { key_columns: key_columns.to_vec(), value_columns: value_columns.to_vec(), rows: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.value_columns.len()
    }

    pub fn column(&self, name: &str) -> usize {
        self.value_columns.iter().position(|c| *c == name).unwrap_or_else(|| panic!("no column `{name}`"))
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    /// CSV with columns `key.., value.., config_hash, error`.
    pub fn to_csv(&self, config_hash: &str) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let header: Vec<&str> = self
            .key_columns
            .iter()
            .chain(&self.value_columns)
            .copied()
            .chain(["config_hash", "error"])
            .collect();
        w.write_record(&header).map_err(internal)?;
        for row in &self.rows {
            let mut rec: Vec<String> = row.key.iter().chain(&row.values).map(Field::render).collect();
            rec.push(config_hash.to_string());
            rec.push(row.error.clone().unwrap_or_default());
            w.write_record(&rec).map_err(internal)?;
        }
        w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

/// One acceptance band evaluated by an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Band {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

/// Fits, fitted constants and bands of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub fits: Map<String, Value>,
    pub constants: Map<String, Value>,
    pub bands: Vec<Band>,
}

impl Summary {
    pub fn band(&self, name: &str) -> Option<&Band> {
        self.bands.iter().find(|b| b.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.bands.iter().all(|b| b.pass)
    }
}

/// Everything one run produced.
#[derive(Debug, Clone)]
pub struct Report {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub table: Table,
    pub summary: Summary,
    pub wall_time: f64,
}

impl Report {
    pub fn summary_json(&self) -> Value {
        json!({
            "kind": self.config.kind.name(),
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "config_hash": self.config_hash,
            "wall_time_seconds": self.wall_time,
            "rows": self.table.rows.len(),
            "failed_rows": self.table.failed_rows(),
            "fits": self.summary.fits,
            "constants": self.summary.constants,
            "bands": self.summary.bands,
        })
    }

    pub fn csv_path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.csv", self.config.kind.name()))
    }

    pub fn summary_path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.summary.json", self.config.kind.name()))
    }

    /// Writes `<out>/<kind>.csv` and `<out>/<kind>.summary.json`.
    pub fn write(&self) -> Result<(), CliError> {
        let dir = &self.config.out;
        fs::create_dir_all(dir).map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
        fs::write(self.csv_path(dir), self.table.to_csv(&self.config_hash)?).map_err(internal)?;
        let mut text = serde_json::to_string_pretty(&self.summary_json()).map_err(internal)?;
        text.push('\n');
        fs::write(self.summary_path(dir), text).map_err(internal)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["n", "function"], &["error_sup"]);
        t.rows.push(Row::ok(vec![8usize.into(), "sine".into()], vec![0.1f64.into()]));
        t.rows.push(Row::failed(vec![16usize.into(), "x,y".into()], 1, "boom"));
        let text = String::from_utf8(t.to_csv("abc").unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,function,error_sup,config_hash,error");
        assert_eq!(lines[1], "8,sine,1.0000000000000001e-1,abc,");
        assert_eq!(lines[2], "16,\"x,y\",,abc,boom");
        assert_eq!(t.failed_rows(), 1);
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1f64 + 0.2;
        let s = Field::Float(x).render();
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }
}
