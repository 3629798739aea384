//! Runs the trials of an experiment and persists records, the aggregate
//! table and the progress plot.

use std::fs;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use log::{info, warn};

use super::aggregate::{aggregate, to_csv};
use super::config::ExperimentConfig;
use super::metrics::{ideal_hypervolume, union_front};
use super::plot::{render_svg, Series};
use super::record::{RunRecord, TrialStatus};
use crate::engine::baseline::random_search;
use crate::engine::{Algorithm, Mopls, RunFailure, RunTrace};
use crate::error::{Error, Result};
use crate::hypervolume::hv_exact;
use crate::parallel::Executor;
use crate::problems::Problem;

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const PLOT_FILE: &str = "progress.svg";

/// Outcome of [`run_experiment`].
#[derive(Debug)]
pub struct ExperimentSummary {
    pub records: Vec<RunRecord>,
    pub record_paths: Vec<PathBuf>,
    pub aggregate_path: PathBuf,
    pub plot_path: PathBuf,
    /// Seeds whose trial failed, with the reason.
    pub failures: Vec<(u64, String)>,
}

pub fn record_file_name(seed: u64) -> String {
    format!("trial-{seed:04}.jsonl")
}

/// Runs one trial of `config` with `seed`; the outer error covers setup,
/// the inner one a run that stopped part way.
pub fn run_trial(
    config: &ExperimentConfig,
    seed: u64,
) -> Result<std::result::Result<RunTrace, RunFailure>> {
    let params = config.engine_params()?;
    let mut executor = Executor::new(config.problem()?, config.workers)?.with_mode(config.clock);
    Ok(match config.algorithm {
        Algorithm::Mopls => Mopls::new(params).run(&mut executor, seed),
        Algorithm::RandomSearch => {
            random_search(&params, &mut executor, seed, &mut |_, _| ControlFlow::Continue(()))
        }
    })
}

/// Turns finished traces into records. The ideal hypervolume comes from
/// the problem's analytic front, or else from the non-dominated union of
/// every trial's final front.
pub fn records_from_traces(
    problem: &dyn Problem,
    label: &str,
    traces: &[(RunTrace, TrialStatus)],
) -> Result<Vec<RunRecord>> {
    let reference = problem.reporting_ref();
    let hv_ideal = match ideal_hypervolume(problem, &reference)? {
        Some(hv) => hv,
        None => {
            let fronts: Vec<_> = traces.iter().map(|(t, _)| t.final_pareto()).collect();
            hv_exact(&union_front(&fronts)?, &reference)?
        }
    };
    traces
        .iter()
        .map(|(trace, status)| RunRecord::from_trace(label, trace, &reference, hv_ideal, status.clone()))
        .collect()
}

/// Runs every seed of `config` in order, then writes one record per trial,
/// `aggregate.csv` and `progress.svg` into `config.out`. A failed trial is
/// recorded with its partial trace and left out of the aggregate.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    let problem = config.problem()?;
    config.engine_params()?;
    fs::create_dir_all(&config.out)?;
    let label = config.problem_label();

    let mut traces = Vec::with_capacity(config.seeds.len());
    let mut failures = Vec::new();
    for &seed in &config.seeds {
        info!("{label}: trial with seed {seed}");
        match run_trial(config, seed)? {
            Ok(trace) => traces.push((trace, TrialStatus::Completed)),
            Err(failure) => {
                warn!("{label}: trial with seed {seed} failed: {}", failure.error);
                let message = failure.error.to_string();
                failures.push((seed, message.clone()));
                traces.push((*failure.trace, TrialStatus::Failed { message }));
            }
        }
    }
    if !failures.is_empty() {
        warn!(
            "{label}: aggregating {} of {} trials",
            config.seeds.len() - failures.len(),
            config.seeds.len()
        );
    }

    let records = records_from_traces(problem.as_ref(), &label, &traces)?;
    let mut record_paths = Vec::with_capacity(records.len());
    for rec in &records {
        let path = config.out.join(record_file_name(rec.header.seed));
        rec.write(&path)?;
        record_paths.push(path);
    }
    let (aggregate_path, plot_path) = write_summaries(&config.out, &records)?;
    Ok(ExperimentSummary {
        records,
        record_paths,
        aggregate_path,
        plot_path,
        failures,
    })
}

/// Writes `aggregate.csv` and `progress.svg` for `records` into `dir`.
pub fn write_summaries(dir: &Path, records: &[RunRecord]) -> Result<(PathBuf, PathBuf)> {
    let rows = aggregate(records);
    let aggregate_path = dir.join(AGGREGATE_FILE);
    fs::write(&aggregate_path, to_csv(&rows))?;
    let title = records
        .first()
        .map(|r| r.header.problem.clone())
        .unwrap_or_default();
    let label = records.first().map(|r| r.label()).unwrap_or_default();
    let plot_path = dir.join(PLOT_FILE);
    fs::write(&plot_path, render_svg(&title, &[Series { label, rows }]))?;
    Ok((aggregate_path, plot_path))
}

/// Reads every `trial-*.jsonl` in `dir`, in file-name order.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("trial-") && n.ends_with(".jsonl"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Config(format!("no trial records in {}", dir.display())));
    }
    paths.iter().map(|p| RunRecord::read(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::aggregate::from_csv;
    use crate::bench::config::PartialConfig;

    #[test]
    fn writes_records_and_summaries() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PartialConfig::from_toml(&format!(
            r#"
            problem = "zdt1"
            dim = 3
            pop = 2
            budget = 16
            trials = 2
            out = "{}"

            [params]
            n-cand-factor = 40
            "#,
            dir.path().display()
        ))
        .unwrap()
        .resolve()
        .unwrap();
        let summary = run_experiment(&cfg).unwrap();
        assert_eq!(summary.record_paths.len(), 2);
        assert!(summary.failures.is_empty());
        let loaded = load_records(dir.path()).unwrap();
        assert_eq!(loaded, summary.records);
        let csv = fs::read_to_string(&summary.aggregate_path).unwrap();
        assert_eq!(from_csv(&csv).unwrap(), aggregate(&loaded));
        assert!(fs::read_to_string(&summary.plot_path).unwrap().contains("<svg"));
    }

    #[test]
    fn failed_trial_is_recorded_and_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PartialConfig {
            problem: Some("zdt1".into()),
            dim: Some(3),
            pop: Some(2),
            budget: Some(16),
            seeds: Some(vec![1]),
            out: Some(dir.path().to_path_buf()),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        let problem = cfg.problem().unwrap();
        let trace = run_trial(&cfg, 1).unwrap().unwrap();
        let mut partial = trace.clone();
        partial.rows.truncate(2);
        let recs = records_from_traces(
            problem.as_ref(),
            "zdt1-d3",
            &[
                (trace, TrialStatus::Completed),
                (
                    partial,
                    TrialStatus::Failed {
                        message: "simulator crashed".into(),
                    },
                ),
            ],
        )
        .unwrap();
        let rows = aggregate(&recs);
        assert!(rows.iter().all(|r| r.trials == 1));
    }
}
