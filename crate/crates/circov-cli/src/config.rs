//! Resolved experiment configuration: command-line flags layered over an
//! optional TOML file.
//!
//! The file mirrors the flags. Global settings are top-level keys, and each
//! command reads a table named after it, with keys equal to the parameter
//! names:
//!
//! ```toml
//! seed = 7
//! trials = 100
//!
//! [tree-run]
//! mass = "1013"
//! mode = "plain"
//! ```
//!
//! A flag given on the command line always wins. A value from the file
//! beats the built-in default.

use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Output format of the main report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every command.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// Master seed; trial `k` derives its stream from `(seed, k)`.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Working precision for circle points, in bits.
    #[arg(long, global = true, default_value_t = circov::arith::DEFAULT_PRECISION)]
    pub precision_bits: u32,
    /// Number of Monte Carlo trials (or random samples) where applicable.
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: u64,
    /// Output file; the report goes to stdout when absent.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Also write plot data (CSV) to this file.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
}

/// Everything needed to rerun an experiment bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(flatten)]
    pub global: GlobalArgs,
    /// Fully resolved command parameters.
    pub params: serde_json::Value,
}

impl ExperimentConfig {
    /// Renders the configuration in the file format accepted by `--config`.
    pub fn to_toml(&self) -> Result<String> {
        let mut root = toml::Table::new();
        let globals = serde_json::to_value(&self.global)?;
        insert_json(&mut root, &globals)?;
        let mut section = toml::Table::new();
        insert_json(&mut section, &self.params)?;
        root.insert(self.command.clone(), toml::Value::Table(section));
        Ok(toml::to_string(&root)?)
    }

    /// Reads a configuration written by [`Self::to_toml`] (or by hand) for
    /// `command`, filling unspecified values with defaults.
    pub fn from_toml(text: &str, command: &str) -> Result<Self> {
        let table: toml::Table = text.parse()?;
        let mut globals = serde_json::to_value(default_globals())?;
        overlay_file(&mut globals, &table, |k| table.get(k).is_some_and(|v| !v.is_table()))?;
        let params = match table.get(command) {
            Some(toml::Value::Table(t)) => serde_json::to_value(t).map_err(CliError::from)?,
            Some(_) => return Err(CliError::Schema(format!("[{command}] must be a table"))),
            None => serde_json::Value::Object(Default::default()),
        };
        Ok(ExperimentConfig {
            command: command.to_string(),
            global: serde_json::from_value(globals)?,
            params,
        })
    }
}

fn default_globals() -> GlobalArgs {
    GlobalArgs {
        seed: 1,
        precision_bits: circov::arith::DEFAULT_PRECISION,
        trials: 100,
        out: None,
        format: Format::Json,
        threads: None,
        plot: None,
    }
}

fn insert_json(table: &mut toml::Table, value: &serde_json::Value) -> Result<()> {
    let serde_json::Value::Object(map) = value else {
        return Err(CliError::Schema("parameters must form a table".into()));
    };
    for (k, v) in map {
        if v.is_null() {
            continue;
        }
        let tv = toml::Value::try_from(v).map_err(CliError::from)?;
        table.insert(k.clone(), tv);
    }
    Ok(())
}

/// Copies keys from `file` into `target` where `take(key)` allows it.
fn overlay_file(target: &mut serde_json::Value, file: &toml::Table, take: impl Fn(&str) -> bool) -> Result<()> {
    let serde_json::Value::Object(map) = target else {
        return Err(CliError::Schema("parameters must form a table".into()));
    };
    for (k, v) in file {
        if v.is_table() || !take(k) {
            continue;
        }
        map.insert(k.clone(), serde_json::to_value(v)?);
    }
    Ok(())
}

/// Keys of `value` not set explicitly on the command line are taken from
/// `file` when present there.
pub fn layer<T: Serialize + DeserializeOwned>(value: &T, matches: &ArgMatches, file: Option<&toml::Table>) -> Result<T> {
    let mut json = serde_json::to_value(value)?;
    if let Some(file) = file {
        let known: Vec<String> = match &json {
            serde_json::Value::Object(m) => m.keys().cloned().collect(),
            _ => Vec::new(),
        };
        for key in file.keys() {
            if !file[key].is_table() && !known.contains(key) && !is_optional_key(matches, key) {
                return Err(CliError::Schema(format!("unknown configuration key {key:?}")));
            }
        }
        overlay_file(&mut json, file, |k| {
            !matches!(
                matches.try_get_raw(k).ok().flatten().and(matches.value_source(k)),
                Some(ValueSource::CommandLine)
            )
        })?;
    }
    serde_json::from_value(json).map_err(|e| CliError::Schema(e.to_string()))
}

/// Optional flags are absent from the serialized value when unset.
fn is_optional_key(matches: &ArgMatches, key: &str) -> bool {
    matches.try_get_raw(key).is_ok()
}
