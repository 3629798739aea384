//! Speed-up tables computed from stored records.
//!
//! The baseline's time is the number of evaluations its trial-averaged
//! coverage needs to reach the target; the parallel algorithm's time is the
//! number of iterations its trial-averaged coverage needs.

use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate, AggregateRow};
use super::metrics::{speedup, time_to_target};
use super::record::RunRecord;
use super::SCHEMA_VERSION;
use crate::error::{Error, Result};

/// How per-trial coverages are combined at each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    #[default]
    Mean,
    Median,
}

impl Statistic {
    fn pick(self, row: &AggregateRow) -> Option<f64> {
        match self {
            Statistic::Mean => row.hc_mean,
            Statistic::Median => row.hc_median,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub problem: String,
    pub baseline: String,
    pub target: String,
    pub statistic: Statistic,
    pub target_hc: f64,
    /// Baseline evaluations to target; `None` if never reached.
    pub baseline_time: Option<usize>,
    /// Target iterations to target; `None` if never reached.
    pub target_time: Option<usize>,
    pub speedup: Option<f64>,
    pub baseline_max_hc: f64,
    pub target_max_hc: f64,
}

impl SpeedupRow {
    pub fn reached(&self) -> bool {
        self.speedup.is_some()
    }
}

fn curve(rows: &[AggregateRow], stat: Statistic, x: fn(&AggregateRow) -> usize) -> Vec<(usize, f64)> {
    rows.iter()
        .filter_map(|r| Some((x(r), stat.pick(r)?)))
        .collect()
}

fn single_label(records: &[RunRecord], what: &str) -> Result<(String, String)> {
    let first = records
        .iter()
        .find(|r| r.is_completed())
        .ok_or_else(|| Error::MetricUndefined(format!("no completed {what} trials")))?;
    Ok((first.header.problem.clone(), first.label()))
}

/// Speed-up of `target` over `baseline` to coverage `target_hc`; when no
/// target is given, the baseline's final averaged coverage is used.
pub fn speedup_row(
    baseline: &[RunRecord],
    target: &[RunRecord],
    target_hc: Option<f64>,
    stat: Statistic,
) -> Result<SpeedupRow> {
    let (problem, baseline_label) = single_label(baseline, "baseline")?;
    let (target_problem, target_label) = single_label(target, "target")?;
    if problem != target_problem {
        return Err(Error::MetricUndefined(format!(
            "baseline solves {problem} but target solves {target_problem}"
        )));
    }
    let b = curve(&aggregate(baseline), stat, |r| r.evaluations);
    let t = curve(&aggregate(target), stat, |r| r.iteration);
    let alpha = match target_hc {
        Some(a) => a,
        None => b
            .last()
            .map(|p| p.1)
            .ok_or_else(|| Error::MetricUndefined("baseline has no defined coverage".into()))?,
    };
    if !(alpha > 0.0) {
        return Err(Error::MetricUndefined(format!(
            "target coverage must be positive, got {alpha}"
        )));
    }
    let baseline_time = time_to_target(&b, alpha);
    let target_time = time_to_target(&t, alpha);
    let ratio = match (baseline_time, target_time) {
        (Some(tb), Some(ta)) => Some(speedup(tb as f64, ta as f64)?),
        _ => None,
    };
    let max = |c: &[(usize, f64)]| c.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(SpeedupRow {
        problem,
        baseline: baseline_label,
        target: target_label,
        statistic: stat,
        target_hc: alpha,
        baseline_time,
        target_time,
        speedup: ratio,
        baseline_max_hc: max(&b),
        target_max_hc: max(&t),
    })
}

pub const CSV_HEADER: &str = "schema_version,problem,baseline,target,statistic,target_hc,baseline_time,target_time,speedup,baseline_max_hc,target_max_hc";

pub fn to_csv(rows: &[SpeedupRow]) -> String {
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_else(|| "not reached".into());
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let stat = match r.statistic {
            Statistic::Mean => "mean",
            Statistic::Median => "median",
        };
        out.push_str(&format!(
            "{SCHEMA_VERSION},{},{},{},{stat},{},{},{},{},{},{}\n",
            r.problem,
            r.baseline,
            r.target,
            r.target_hc,
            opt(r.baseline_time),
            opt(r.target_time),
            r.speedup.map(|s| s.to_string()).unwrap_or_else(|| "not reached".into()),
            r.baseline_max_hc,
            r.target_max_hc
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::record::{RecordArchive, RecordHeader, RecordRow, TrialStatus};
    use crate::engine::{Algorithm, EngineParams, IterationRow};

    fn record(population: usize, hcs: &[f64]) -> RunRecord {
        let params = EngineParams::new(2, 6 + population * (hcs.len() - 1), population).unwrap();
        let rows = hcs
            .iter()
            .enumerate()
            .map(|(i, &hc)| RecordRow {
                trace: IterationRow {
                    iteration: i,
                    evaluations: 6 + population * i,
                    threshold: 1.0,
                    center_ids: vec![],
                    new_ids: vec![],
                    modes: vec![],
                    failures: 0,
                    entered_tabu: vec![],
                    released: vec![],
                    pareto_ids: vec![],
                    tabu_size: 0,
                    radius_min: 0.2,
                    radius_median: 0.2,
                    radius_max: 0.2,
                },
                hv: hc,
                hc: Some(hc),
            })
            .collect();
        RunRecord {
            header: RecordHeader {
                problem: "zdt1-d2".into(),
                algorithm: Algorithm::Mopls,
                seed: 0,
                params,
                reference: vec![11.0, 11.0],
                hv_initial: Some(0.0),
                hv_ideal: 1.0,
            },
            rows,
            archive: RecordArchive {
                status: TrialStatus::Completed,
                points: vec![],
            },
        }
    }

    #[test]
    fn serial_versus_parallel() {
        let base = [record(1, &[0.0, 0.2, 0.4, 0.6, 0.8])];
        let par = [record(4, &[0.0, 0.7, 0.9])];
        let row = speedup_row(&base, &par, Some(0.6), Statistic::Mean).unwrap();
        // Baseline reaches 0.6 at 6 + 3 = 9 evaluations, target at iteration 1.
        assert_eq!(row.baseline_time, Some(9));
        assert_eq!(row.target_time, Some(1));
        assert_eq!(row.speedup, Some(9.0));
        assert_eq!(row.target, "mopls N=4");
    }

    #[test]
    fn default_target_and_unreached() {
        let base = [record(1, &[0.0, 0.5]), record(1, &[0.0, 0.7])];
        let par = [record(4, &[0.0, 0.3])];
        let row = speedup_row(&base, &par, None, Statistic::Mean).unwrap();
        assert!((row.target_hc - 0.6).abs() < 1e-12);
        assert_eq!(row.target_time, None);
        assert!(!row.reached());
        assert!(to_csv(&[row]).contains("not reached"));
        let med = speedup_row(&base, &par, None, Statistic::Median).unwrap();
        assert!((med.target_hc - 0.6).abs() < 1e-12);
    }
}
