//! Per-iteration summaries across trials, written as CSV.

use std::collections::BTreeMap;

use super::record::RunRecord;
use super::SCHEMA_VERSION;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub iteration: usize,
    pub evaluations: usize,
    /// Trials contributing a defined coverage at this iteration.
    pub trials: usize,
    pub hc_mean: Option<f64>,
    pub hc_median: Option<f64>,
    pub hc_min: Option<f64>,
    pub hc_max: Option<f64>,
    pub hv_mean: f64,
    pub hv_median: f64,
}

pub const CSV_HEADER: &str =
    "schema_version,iteration,evaluations,trials,hc_mean,hc_median,hc_min,hc_max,hv_mean,hv_median";

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

/// Folds completed records into one row per iteration. Failed trials are skipped.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut by_iteration: BTreeMap<usize, (usize, Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for rec in records.iter().filter(|r| r.is_completed()) {
        for row in &rec.rows {
            let entry = by_iteration
                .entry(row.trace.iteration)
                .or_insert_with(|| (row.trace.evaluations, Vec::new(), Vec::new()));
            entry.1.extend(row.hc);
            entry.2.push(row.hv);
        }
    }
    by_iteration
        .into_iter()
        .map(|(iteration, (evaluations, hc, hv))| AggregateRow {
            iteration,
            evaluations,
            trials: hc.len(),
            hc_mean: mean(&hc),
            hc_median: median(&hc),
            hc_min: hc.iter().copied().reduce(f64::min),
            hc_max: hc.iter().copied().reduce(f64::max),
            hv_mean: mean(&hv).unwrap_or(0.0),
            hv_median: median(&hv).unwrap_or(0.0),
        })
        .collect()
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn to_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{SCHEMA_VERSION},{},{},{},{},{},{},{},{},{}\n",
            r.iteration,
            r.evaluations,
            r.trials,
            cell(r.hc_mean),
            cell(r.hc_median),
            cell(r.hc_min),
            cell(r.hc_max),
            r.hv_mean,
            r.hv_median
        ));
    }
    out
}

pub fn from_csv(text: &str) -> Result<Vec<AggregateRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Config("unexpected aggregate CSV header".into()));
    }
    let bad = |n: usize, what: &str| Error::Config(format!("aggregate CSV line {n}: bad {what}"));
    lines
        .enumerate()
        .map(|(i, line)| {
            let n = i + 2;
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(bad(n, "field count"));
            }
            if f[0].parse::<u32>().ok() != Some(SCHEMA_VERSION) {
                return Err(bad(n, "schema_version"));
            }
            let int = |s: &str| s.parse::<usize>().map_err(|_| bad(n, "integer"));
            let real = |s: &str| s.parse::<f64>().map_err(|_| bad(n, "number"));
            let opt = |s: &str| {
                if s.is_empty() {
                    Ok(None)
                } else {
                    real(s).map(Some)
                }
            };
            Ok(AggregateRow {
                iteration: int(f[1])?,
                evaluations: int(f[2])?,
                trials: int(f[3])?,
                hc_mean: opt(f[4])?,
                hc_median: opt(f[5])?,
                hc_min: opt(f[6])?,
                hc_max: opt(f[7])?,
                hv_mean: real(f[8])?,
                hv_median: real(f[9])?,
            })
        })
        .collect()
}
