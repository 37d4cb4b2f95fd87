//! Plot-ready data extracted from a finished report.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::report::{RunReport, Table};

/// The plots a report can feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    /// `ln count` against `ln(1/scale)` with the fitted line (`dim-estimate`).
    Dimension,
    /// Mean survivors per level against the threshold `base^level` (`tree-run`).
    Survival,
    /// `ln ℓ-term` of the covering series against `n` (`shepp`).
    SheppDecay,
}

impl PlotKind {
    /// The command whose report this plot reads.
    pub fn source_command(self) -> &'static str {
        match self {
            PlotKind::Dimension => "dim-estimate",
            PlotKind::Survival => "tree-run",
            PlotKind::SheppDecay => "shepp",
        }
    }

    /// Default plot for a command, if it has one.
    pub fn for_command(command: &str) -> Option<Self> {
        [PlotKind::Dimension, PlotKind::Survival, PlotKind::SheppDecay]
            .into_iter()
            .find(|k| k.source_command() == command)
    }
}

fn column(table: &Table, name: &str) -> Result<usize> {
    table
        .columns
        .iter()
        .position(|c| c == name)
        .ok_or_else(|| CliError::Schema(format!("report has no column {name:?}")))
}

fn number(v: &Value) -> Option<f64> {
    v.as_f64()
}

/// Builds the plot table of `kind` from `report`.
///
/// Fails when the report comes from a different command. A report without
/// rows yields a header-only table.
pub fn emit_plotdata(report: &RunReport, kind: PlotKind) -> Result<Table> {
    if report.command != kind.source_command() {
        return Err(CliError::Schema(format!(
            "plot {:?} needs a {} report, got {}",
            kind,
            kind.source_command(),
            report.command
        )));
    }
    let t = &report.table;
    match kind {
        PlotKind::Dimension => {
            let mut out = Table::new(&["log_inverse_scale", "ln_mean_count", "fit"]);
            let (x, y) = (column(t, "log_inverse_scale")?, column(t, "ln_mean_count")?);
            let slope = report.summary.get("slope").and_then(number);
            let intercept = report.summary.get("intercept").and_then(number);
            for row in &t.rows {
                let fit = match (slope, intercept, number(&row[x])) {
                    (Some(s), Some(c), Some(xv)) => json!(c + s * xv),
                    _ => Value::Null,
                };
                out.push(vec![row[x].clone(), row[y].clone(), fit]);
            }
            Ok(out)
        }
        PlotKind::Survival => {
            let mut out = Table::new(&["level", "mean_survivors", "threshold"]);
            let (lvl, surv) = (column(t, "level")?, column(t, "survivors_after")?);
            let base = report
                .config
                .params
                .get("threshold_base")
                .and_then(number)
                .unwrap_or(1.2);
            let mut levels: Vec<(u64, f64, u64)> = Vec::new();
            for row in &t.rows {
                let (Some(l), Some(s)) = (row[lvl].as_u64(), number(&row[surv])) else {
                    continue;
                };
                match levels.iter_mut().find(|e| e.0 == l) {
                    Some(e) => {
                        e.1 += s;
                        e.2 += 1;
                    }
                    None => levels.push((l, s, 1)),
                }
            }
            levels.sort_by_key(|e| e.0);
            for (l, sum, k) in levels {
                out.push(vec![json!(l), json!(sum / k as f64), json!(base.powi(l as i32))]);
            }
            Ok(out)
        }
        PlotKind::SheppDecay => {
            let mut out = Table::new(&["n", "ln_term"]);
            let (n, term) = (column(t, "n")?, column(t, "ln_term")?);
            for row in &t.rows {
                out.push(vec![row[n].clone(), row[term].clone()]);
            }
            Ok(out)
        }
    }
}
