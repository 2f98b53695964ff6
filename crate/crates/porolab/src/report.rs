//! Experiment reports and their CSV/JSON files.
//!
//! Output is a pure function of the config and seed: floats in CSV use
//! 17 significant digits, JSON maps are key-sorted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};

pub const REPORT_SCHEMA: &str = "porolab.report/1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// `{:.16e}` keeps 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: String,
    /// Plain statement of the property the experiment tests.
    pub claim: String,
    pub seed: u64,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub failing_rows: Vec<usize>,
    /// Named whole-run checks besides the per-row ones.
    pub checks: BTreeMap<String, bool>,
    pub summary: BTreeMap<String, Value>,
    pub notes: Vec<String>,
    /// Extra files written next to the report: `(file name, contents)`.
    pub attachments: Vec<(String, String)>,
    /// Config echo, without output paths.
    pub config: Value,
}

impl Report {
    pub fn new(experiment: &str, claim: &str, cfg: &ExperimentConfig, columns: Vec<&'static str>) -> Self {
        let mut echo = cfg.clone();
        echo.experiment = Some(experiment.to_string());
        let mut config = serde_json::to_value(echo).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut config {
            map.remove("output");
        }
        Report {
            experiment: experiment.into(),
            claim: claim.into(),
            seed: cfg.seed,
            columns,
            rows: Vec::new(),
            failing_rows: Vec::new(),
            checks: BTreeMap::new(),
            summary: BTreeMap::new(),
            notes: Vec::new(),
            attachments: Vec::new(),
            config,
        }
    }

    /// Appends a row; `ok = false` marks it failing.
    pub fn row(&mut self, cells: Vec<Cell>, ok: bool) {
        debug_assert_eq!(cells.len(), self.columns.len(), "row width for {}", self.experiment);
        if !ok {
            self.failing_rows.push(self.rows.len());
        }
        self.rows.push(cells);
    }

    pub fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.into(), ok);
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.into(), v.into());
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn pass(&self) -> bool {
        self.failing_rows.is_empty() && self.checks.values().all(|&b| b)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key)?.as_f64()
    }

    pub fn to_csv(&self) -> LabResult<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let csv_err = |e: csv::Error| LabError::Config(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": REPORT_SCHEMA,
            "experiment": self.experiment,
            "claim": self.claim,
            "seed": self.seed,
            "generator": "chacha8",
            "config": self.config,
            "columns": self.columns,
            "row_count": self.rows.len(),
            "verdict": {
                "pass": self.pass(),
                "failing_rows": self.failing_rows,
                "checks": self.checks,
            },
            "summary": self.summary,
            "notes": self.notes,
        })
    }
}

/// Writes `<dir>/<experiment>.csv` and `.json` plus attachments. Nothing is
/// written for a report without rows.
pub fn emit_report(report: &Report, dir: &Path, json: bool, csv: bool) -> LabResult<Vec<PathBuf>> {
    if report.rows.is_empty() {
        return Err(LabError::EmptyReport(report.experiment.clone()));
    }
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    if csv {
        files.push((dir.join(format!("{}.csv", report.experiment)), report.to_csv()?));
    }
    if json {
        let mut text = serde_json::to_string_pretty(&report.to_json()).expect("report json");
        text.push('\n');
        files.push((dir.join(format!("{}.json", report.experiment)), text));
    }
    for (name, body) in &report.attachments {
        files.push((dir.join(name), body.clone()));
    }
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let mut written = Vec::with_capacity(files.len());
    for (path, body) in files {
        std::fs::write(&path, body).map_err(|e| LabError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
