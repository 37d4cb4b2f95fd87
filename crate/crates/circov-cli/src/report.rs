//! Run reports: a config echo, a summary object and one record table.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Format};
use crate::error::Result;

/// A table with a fixed column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; panics if its width differs from the header.
    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// RFC 4180 CSV with a header line (header only when empty).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Rows as JSON objects keyed by column name.
    pub fn to_records(&self) -> Vec<serde_json::Map<String, Value>> {
        self.rows
            .iter()
            .map(|r| self.columns.iter().cloned().zip(r.iter().cloned()).collect())
            .collect()
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Result of one command.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub library_version: String,
    pub config: ExperimentConfig,
    pub summary: Value,
    #[serde(skip)]
    pub table: Table,
}

impl RunReport {
    pub fn new(config: &ExperimentConfig, summary: Value, table: Table) -> Self {
        RunReport {
            command: config.command.clone(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            summary,
            table,
        }
    }

    /// The full report as JSON, with the records under `"records"`.
    pub fn to_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        v["columns"] = serde_json::to_value(&self.table.columns)?;
        v["records"] = serde_json::to_value(self.table.to_records())?;
        Ok(serde_json::to_string_pretty(&v)? + "\n")
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.table.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Wall-clock data kept out of the report so reruns compare byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub command: String,
    pub started_unix_secs: u64,
    pub wall_clock_secs: f64,
    pub library_version: String,
}

/// Writes `body` to `path` and the metadata next to it as `<path>.meta.json`.
pub fn write_outputs(path: &Path, body: &str, meta: &RunMetadata) -> Result<()> {
    std::fs::File::create(path)?.write_all(body.as_bytes())?;
    let mut meta_path = path.as_os_str().to_owned();
    meta_path.push(".meta.json");
    std::fs::write(meta_path, serde_json::to_string_pretty(meta)? + "\n")?;
    Ok(())
}
