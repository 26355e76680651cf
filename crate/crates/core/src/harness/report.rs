//! Report emission in table, CSV and JSON form.
//!
//! The CSV layout is fixed:
//! `instance_id, order_seed, algorithm, k_or_gamma, final_weight, opt_weight,
//! ratio, insertions, max_stored_edges, verifier_failures`.
//! Missing oracle values are left empty. JSON carries every field.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::experiment::{Aggregate, RunReport};
use super::HarnessError;

pub const CSV_COLUMNS: [&str; 10] = [
    "instance_id",
    "order_seed",
    "algorithm",
    "k_or_gamma",
    "final_weight",
    "opt_weight",
    "ratio",
    "insertions",
    "max_stored_edges",
    "verifier_failures",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format `{other}` (expected table, csv or json)")),
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_fixed(x: Option<f64>, digits: usize) -> String {
    x.map(|v| format!("{v:.digits$}")).unwrap_or_else(|| "-".into())
}

pub fn emit_report(reports: &[RunReport], format: ReportFormat) -> Result<String, HarnessError> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_COLUMNS)?;
            for r in reports {
                w.write_record([
                    r.instance_id.clone(),
                    r.order_seed.to_string(),
                    r.algorithm.clone(),
                    r.k_or_gamma.to_string(),
                    r.final_weight.to_string(),
                    opt(r.opt_weight),
                    opt(r.ratio),
                    r.insertions.to_string(),
                    r.max_stored_edges.to_string(),
                    r.verifier_failures.to_string(),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| HarnessError::Report(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| HarnessError::Report(e.to_string()))
        }
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(reports)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Table => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "{:<24} {:>20} {:<9} {:>10} {:>12} {:>12} {:>9} {:>5} {:>6} {:>6}",
                "instance", "order", "algorithm", "param", "weight", "optimum", "ratio", "ins", "stored", "vfail"
            );
            for r in reports {
                let _ = writeln!(
                    s,
                    "{:<24} {:>20} {:<9} {:>10.6} {:>12.4} {:>12} {:>9} {:>5} {:>6} {:>6}",
                    r.instance_id,
                    r.order_seed,
                    r.algorithm,
                    r.k_or_gamma,
                    r.final_weight,
                    opt_fixed(r.opt_weight, 4),
                    opt_fixed(r.ratio, 5),
                    r.insertions,
                    r.max_stored_edges,
                    r.verifier_failures
                );
            }
            Ok(s)
        }
    }
}

/// Per-algorithm summary lines (worst and mean ratio).
pub fn emit_aggregates(aggregates: &[Aggregate]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<9} {:>10} {:>6} {:>11} {:>11} {:>8}",
        "algorithm", "param", "runs", "worst", "mean", "failures"
    );
    for a in aggregates {
        let _ = writeln!(
            s,
            "{:<9} {:>10.6} {:>6} {:>11} {:>11} {:>8}",
            a.algorithm,
            a.k_or_gamma,
            a.runs,
            opt_fixed(a.worst_ratio, 6),
            opt_fixed(a.mean_ratio, 6),
            a.failures
        );
    }
    s
}

pub fn read_json_reports(text: &str) -> Result<Vec<RunReport>, HarnessError> {
    Ok(serde_json::from_str(text)?)
}
