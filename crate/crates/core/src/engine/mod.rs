//! The MOPLS iteration and its outer loop.
//!
//! Step 1 evaluates a Latin hypercube design of `E_I` points. Each iteration
//! of Step 2 then selects `N` centers ([`centers`]), runs one surrogate
//! search per center in parallel ([`search`]), evaluates the `N` proposals
//! as one synchronous batch, and updates the memory archive ([`memory`]).
//! The loop stops once `E_T` evaluations have been spent.

pub mod baseline;
pub mod centers;
pub mod memory;
pub mod search;

use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DecisionVector, EvaluationArchive, ObjectiveVector};
use crate::error::{Error, Result};
use crate::hypervolume::ReferenceVector;
use crate::parallel::BatchEvaluator;
use crate::sampling::{latin_hypercube, RngStream};

pub use centers::{d_thresh, select_centers, CenterSelection};
pub use memory::{update_memory_archive, MemoryUpdate};
pub use search::{
    generate_candidates, mutate, propose, worker_search, Proposal, SearchContext, SearchMode,
};

/// Tunable settings. Defaults follow the published configuration:
/// `E_I = 2d + 2`, `r_init = 0.2`, `prob_cand = 0.9`, `prob_hv = 0.65`,
/// `c_thresh = 3`, `c_tenure = 5`, `500 * d` candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub dim: usize,
    pub total_evals: usize,
    pub init_evals: usize,
    pub population: usize,
    pub r_init: f64,
    pub prob_cand: f64,
    pub prob_hv: f64,
    pub c_thresh: u32,
    pub c_tenure: u32,
    pub n_cand_factor: usize,
    pub mc_samples: usize,
    pub mutation_sigma: f64,
    pub training_cap: usize,
    /// Margin added beyond the worst observed objectives for the in-loop reference.
    pub ref_margin: f64,
}

impl EngineParams {
    pub fn new(dim: usize, total_evals: usize, population: usize) -> Result<Self> {
        let params = Self::unchecked(dim, total_evals, population);
        params.validate()?;
        Ok(params)
    }

    /// Default settings without validation, for callers that adjust fields first.
    pub fn unchecked(dim: usize, total_evals: usize, population: usize) -> Self {
        Self {
            dim,
            total_evals,
            init_evals: 2 * dim + 2,
            population,
            r_init: 0.2,
            prob_cand: 0.9,
            prob_hv: 0.65,
            c_thresh: 3,
            c_tenure: 5,
            n_cand_factor: 500,
            mc_samples: 10_000,
            mutation_sigma: 0.1,
            training_cap: crate::rbf::DEFAULT_TRAINING_CAP,
            ref_margin: 0.1,
        }
    }

    /// Budget of `wall_budget` synchronous iterations after the initial design.
    pub fn with_wall_budget(dim: usize, wall_budget: usize, population: usize) -> Result<Self> {
        Self::new(dim, 2 * dim + 2 + wall_budget * population, population)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.dim == 0 {
            return fail("dimension must be positive".into());
        }
        if self.init_evals < self.dim + 1 {
            return fail(format!(
                "initial design of {} points is smaller than d + 1 = {}",
                self.init_evals,
                self.dim + 1
            ));
        }
        if self.total_evals < self.init_evals {
            return fail(format!(
                "total budget {} is below the initial design {}",
                self.total_evals, self.init_evals
            ));
        }
        if self.population == 0 {
            return fail("population must be at least 1".into());
        }
        if !(self.r_init > 0.0 && self.r_init.is_finite()) {
            return fail(format!("r_init must be positive, got {}", self.r_init));
        }
        for (name, p) in [("prob_cand", self.prob_cand), ("prob_hv", self.prob_hv)] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.n_cand_factor == 0 || self.training_cap == 0 {
            return fail("candidate factor and training cap must be positive".into());
        }
        if !(self.mutation_sigma > 0.0) || !(self.ref_margin >= 0.0) {
            return fail("mutation sigma must be positive and reference margin non-negative".into());
        }
        Ok(())
    }

    /// Number of synchronous iterations the budget allows.
    pub fn iterations(&self) -> usize {
        (self.total_evals - self.init_evals).div_ceil(self.population)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Mopls,
    RandomSearch,
}

/// One row of the run trace. Row 0 describes the initial design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub iteration: usize,
    /// Archive size after this iteration.
    pub evaluations: usize,
    pub threshold: f64,
    pub center_ids: Vec<usize>,
    pub new_ids: Vec<usize>,
    pub modes: Vec<SearchMode>,
    pub failures: usize,
    pub entered_tabu: Vec<usize>,
    pub released: Vec<usize>,
    pub pareto_ids: Vec<usize>,
    pub tabu_size: usize,
    pub radius_min: f64,
    pub radius_median: f64,
    pub radius_max: f64,
}

impl IterationRow {
    fn summarize(archive: &EvaluationArchive, iteration: usize) -> Self {
        let mut radii: Vec<f64> = archive.points().iter().map(|p| p.memory.radius).collect();
        radii.sort_by(f64::total_cmp);
        let median = if radii.is_empty() {
            0.0
        } else if radii.len() % 2 == 1 {
            radii[radii.len() / 2]
        } else {
            0.5 * (radii[radii.len() / 2 - 1] + radii[radii.len() / 2])
        };
        Self {
            iteration,
            evaluations: archive.len(),
            threshold: 1.0,
            center_ids: Vec::new(),
            new_ids: Vec::new(),
            modes: Vec::new(),
            failures: 0,
            entered_tabu: Vec::new(),
            released: Vec::new(),
            pareto_ids: archive.pareto_ids().iter().copied().collect(),
            tabu_size: archive.tabu_ids().len(),
            radius_min: radii.first().copied().unwrap_or(0.0),
            radius_median: median,
            radius_max: radii.last().copied().unwrap_or(0.0),
        }
    }
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub params: EngineParams,
    pub seed: u64,
    pub rows: Vec<IterationRow>,
    pub archive: EvaluationArchive,
}

impl RunTrace {
    fn new(algorithm: Algorithm, params: &EngineParams, seed: u64, dim: usize, k: usize) -> Self {
        Self {
            algorithm,
            params: params.clone(),
            seed,
            rows: Vec::new(),
            archive: EvaluationArchive::new(dim, k),
        }
    }

    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn initial_pareto_ids(&self) -> &[usize] {
        self.rows.first().map_or(&[], |r| &r.pareto_ids)
    }

    pub fn final_pareto(&self) -> Vec<ObjectiveVector> {
        self.archive.pareto_objectives()
    }
}

/// A run that stopped early; `trace` holds everything up to the failure.
#[derive(Debug, Error)]
#[error("run aborted after {} iterations: {error}", trace.iterations())]
pub struct RunFailure {
    #[source]
    pub error: Error,
    pub trace: Box<RunTrace>,
}

/// Decides per iteration whether to keep going.
pub type Observer<'a> = dyn FnMut(&IterationRow, &EvaluationArchive) -> ControlFlow<()> + 'a;

pub(crate) fn admit_initial_design<E: BatchEvaluator>(
    trace: &mut RunTrace,
    evaluator: &mut E,
    rng: &mut RngStream,
) -> Result<()> {
    let params = &trace.params;
    let design = latin_hypercube(params.init_evals, params.dim, rng);
    let batch = evaluator.evaluate_batch(design)?;
    for (index, (x, values)) in batch.outputs.into_iter().enumerate() {
        let y = ObjectiveVector::new(values.clone()).map_err(|_| Error::NonFiniteEvaluation {
            iteration: 0,
            worker: index,
            values,
        })?;
        trace.archive.push(x, y, params.r_init)?;
    }
    trace.rows.push(IterationRow::summarize(&trace.archive, 0));
    evaluator.begin_iterations();
    Ok(())
}

fn check_evaluator<E: BatchEvaluator>(params: &EngineParams, evaluator: &E) -> Result<()> {
    params.validate()?;
    if evaluator.dim() != params.dim {
        return Err(Error::DimensionMismatch {
            expected: params.dim,
            found: evaluator.dim(),
        });
    }
    Ok(())
}

/// The optimizer.
#[derive(Debug, Clone)]
pub struct Mopls {
    params: EngineParams,
}

impl Mopls {
    pub fn new(params: EngineParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &EngineParams {
        &self.params
    }

    pub fn run<E: BatchEvaluator>(
        &self,
        evaluator: &mut E,
        seed: u64,
    ) -> std::result::Result<RunTrace, RunFailure> {
        self.run_observed(evaluator, seed, &mut |_, _| ControlFlow::Continue(()))
    }

    /// Runs until the budget is spent or `observer` breaks.
    pub fn run_observed<E: BatchEvaluator>(
        &self,
        evaluator: &mut E,
        seed: u64,
        observer: &mut Observer<'_>,
    ) -> std::result::Result<RunTrace, RunFailure> {
        let params = &self.params;
        let mut trace = RunTrace::new(
            Algorithm::Mopls,
            params,
            seed,
            params.dim,
            evaluator.n_objectives(),
        );
        let outcome = (|| {
            check_evaluator(params, evaluator)?;
            let mut master = RngStream::master(seed);
            admit_initial_design(&mut trace, evaluator, &mut master)?;
            if observer(&trace.rows[0], &trace.archive).is_break() {
                return Ok(());
            }
            let mut iteration = 0;
            while trace.archive.len() < params.total_evals {
                iteration += 1;
                let row = self.iterate(&mut trace.archive, evaluator, seed, iteration)?;
                trace.rows.push(row);
                if observer(trace.rows.last().expect("just pushed"), &trace.archive).is_break() {
                    break;
                }
            }
            Ok(())
        })();
        match outcome {
            Ok(()) => Ok(trace),
            Err(error) => Err(RunFailure {
                error,
                trace: Box::new(trace),
            }),
        }
    }

    /// One synchronous iteration: select, search in parallel, evaluate, update.
    pub fn iterate<E: BatchEvaluator>(
        &self,
        archive: &mut EvaluationArchive,
        evaluator: &mut E,
        seed: u64,
        iteration: usize,
    ) -> Result<IterationRow> {
        let params = &self.params;
        let m = archive.len();
        let all: Vec<&[f64]> = archive.points().iter().map(|p| &p.objectives[..]).collect();
        let reference = ReferenceVector::from_worst(&all, params.ref_margin)
            .ok_or_else(|| Error::InvalidParams("archive is empty".into()))?;
        let selection = select_centers(archive, params, m, iteration, &reference)?;
        let pareto_before = archive.pareto_objectives();

        let snapshot: &EvaluationArchive = archive;
        let ctx = SearchContext {
            archive: snapshot,
            pareto: &pareto_before,
            reference: &reference,
            params,
        };
        let mut rngs: Vec<RngStream> = (0..selection.ids.len())
            .map(|w| RngStream::worker(seed, iteration, w))
            .collect();
        let search = |jobs: &mut [RngStream]| -> Vec<Result<Proposal>> {
            jobs.par_iter_mut()
                .zip(selection.ids.par_iter())
                .map(|(rng, &c)| propose(&snapshot.points()[c], &ctx, rng))
                .collect()
        };
        let proposals: Vec<Proposal> = match evaluator.worker_pool() {
            Some(pool) => pool.install(|| search(&mut rngs)),
            None => search(&mut rngs),
        }
        .into_iter()
        .collect::<Result<_>>()?;

        let modes: Vec<SearchMode> = proposals.iter().map(|p| p.mode).collect();
        let batch = evaluator.evaluate_batch(proposals.into_iter().map(|p| p.point).collect())?;
        let mut new_points: Vec<(DecisionVector, ObjectiveVector)> = Vec::with_capacity(modes.len());
        let mut modes = modes;
        for (worker, (x, values)) in batch.outputs.into_iter().enumerate() {
            match ObjectiveVector::new(values) {
                Ok(y) => new_points.push((x, y)),
                Err(_) => {
                    let center = &snapshot.points()[selection.ids[worker]];
                    let retry = propose(center, &ctx, &mut rngs[worker])?;
                    modes[worker] = retry.mode;
                    let again = evaluator.evaluate_batch(vec![retry.point])?;
                    let (x, values) = again.outputs.into_iter().next().expect("one output");
                    let y = ObjectiveVector::new(values.clone()).map_err(|_| {
                        Error::NonFiniteEvaluation {
                            iteration,
                            worker,
                            values,
                        }
                    })?;
                    new_points.push((x, y));
                }
            }
        }

        let update = update_memory_archive(
            archive,
            &selection.ids,
            new_points,
            &pareto_before,
            &reference,
            params,
        )?;
        let mut row = IterationRow::summarize(archive, iteration);
        row.threshold = selection.threshold;
        row.center_ids = selection.ids;
        row.new_ids = update.new_ids;
        row.modes = modes;
        row.failures = update.failed.iter().filter(|&&f| f).count();
        row.entered_tabu = update.entered_tabu;
        row.released = update.released;
        Ok(row)
    }
}
