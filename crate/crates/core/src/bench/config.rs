//! Experiment configuration. A TOML file and command-line flags share one
//! partial schema; flags are laid over the file before resolving defaults.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::engine::{Algorithm, EngineParams};
use crate::error::{Error, Result};
use crate::parallel::ClockMode;
use crate::problems::{self, ExpensiveProblem, SharedProblem};

/// Default serial evaluation budget.
pub const DEFAULT_BUDGET: usize = 400;

/// Optional overrides of the engine's tunable settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ParamOverrides {
    pub init_evals: Option<usize>,
    pub r_init: Option<f64>,
    pub prob_cand: Option<f64>,
    pub prob_hv: Option<f64>,
    pub c_thresh: Option<u32>,
    pub c_tenure: Option<u32>,
    pub n_cand_factor: Option<usize>,
    pub mc_samples: Option<usize>,
    pub mutation_sigma: Option<f64>,
    pub training_cap: Option<usize>,
    pub ref_margin: Option<f64>,
}

impl ParamOverrides {
    fn overlay(self, top: Self) -> Self {
        Self {
            init_evals: top.init_evals.or(self.init_evals),
            r_init: top.r_init.or(self.r_init),
            prob_cand: top.prob_cand.or(self.prob_cand),
            prob_hv: top.prob_hv.or(self.prob_hv),
            c_thresh: top.c_thresh.or(self.c_thresh),
            c_tenure: top.c_tenure.or(self.c_tenure),
            n_cand_factor: top.n_cand_factor.or(self.n_cand_factor),
            mc_samples: top.mc_samples.or(self.mc_samples),
            mutation_sigma: top.mutation_sigma.or(self.mutation_sigma),
            training_cap: top.training_cap.or(self.training_cap),
            ref_margin: top.ref_margin.or(self.ref_margin),
        }
    }

    fn apply(&self, p: &mut EngineParams) {
        if let Some(v) = self.init_evals {
            p.init_evals = v;
        }
        if let Some(v) = self.r_init {
            p.r_init = v;
        }
        if let Some(v) = self.prob_cand {
            p.prob_cand = v;
        }
        if let Some(v) = self.prob_hv {
            p.prob_hv = v;
        }
        if let Some(v) = self.c_thresh {
            p.c_thresh = v;
        }
        if let Some(v) = self.c_tenure {
            p.c_tenure = v;
        }
        if let Some(v) = self.n_cand_factor {
            p.n_cand_factor = v;
        }
        if let Some(v) = self.mc_samples {
            p.mc_samples = v;
        }
        if let Some(v) = self.mutation_sigma {
            p.mutation_sigma = v;
        }
        if let Some(v) = self.training_cap {
            p.training_cap = v;
        }
        if let Some(v) = self.ref_margin {
            p.ref_margin = v;
        }
    }
}

/// Every setting optional, as read from a file or from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PartialConfig {
    pub problem: Option<String>,
    pub dim: Option<usize>,
    pub algo: Option<Algorithm>,
    pub pop: Option<usize>,
    pub budget: Option<usize>,
    pub wall_budget: Option<usize>,
    pub trials: Option<usize>,
    pub seed_base: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Seconds per evaluation.
    pub delay: Option<f64>,
    pub real_clock: Option<bool>,
    #[serde(default)]
    pub params: ParamOverrides,
}

impl PartialConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Settings in `top` replace those here. A budget in either form on top
    /// replaces both budget forms below.
    pub fn overlay(self, top: Self) -> Self {
        let budget_on_top = top.budget.is_some() || top.wall_budget.is_some();
        let (budget, wall_budget) = if budget_on_top {
            (top.budget, top.wall_budget)
        } else {
            (self.budget, self.wall_budget)
        };
        let seeds_on_top = top.seeds.is_some() || top.trials.is_some() || top.seed_base.is_some();
        Self {
            problem: top.problem.or(self.problem),
            dim: top.dim.or(self.dim),
            algo: top.algo.or(self.algo),
            pop: top.pop.or(self.pop),
            budget,
            wall_budget,
            trials: top.trials.or(self.trials),
            seed_base: top.seed_base.or(self.seed_base),
            seeds: if seeds_on_top { top.seeds } else { self.seeds },
            out: top.out.or(self.out),
            workers: top.workers.or(self.workers),
            delay: top.delay.or(self.delay),
            real_clock: top.real_clock.or(self.real_clock),
            params: self.params.overlay(top.params),
        }
    }

    pub fn resolve(self) -> Result<ExperimentConfig> {
        let problem = self
            .problem
            .ok_or_else(|| Error::Config("no problem given".into()))?
            .to_ascii_lowercase();
        let dim = self
            .dim
            .ok_or_else(|| Error::Config("no dimension given".into()))?;
        problems::benchmark(&problem, dim)?;
        let population = self.pop.unwrap_or(1);
        let budget = match (self.budget, self.wall_budget) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "set either budget or wall-budget, not both".into(),
                ))
            }
            (Some(e), None) => Budget::Evaluations(e),
            (None, Some(w)) => Budget::Iterations(w),
            (None, None) => Budget::Evaluations(DEFAULT_BUDGET),
        };
        let seeds = match self.seeds {
            Some(seeds) => {
                if let Some(t) = self.trials {
                    if t != seeds.len() {
                        return Err(Error::Config(format!(
                            "trials = {t} but {} seeds listed",
                            seeds.len()
                        )));
                    }
                }
                seeds
            }
            None => {
                let base = self.seed_base.unwrap_or(0);
                (0..self.trials.unwrap_or(1) as u64).map(|i| base + i).collect()
            }
        };
        if seeds.is_empty() {
            return Err(Error::Config("at least one trial is required".into()));
        }
        let delay = self.delay.unwrap_or(0.0);
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(Error::Config(format!("delay must be a non-negative number, got {delay}")));
        }
        let config = ExperimentConfig {
            problem,
            dim,
            algorithm: self.algo.unwrap_or(Algorithm::Mopls),
            population,
            budget,
            seeds,
            out: self.out.unwrap_or_else(|| PathBuf::from("results")),
            workers: self.workers.unwrap_or(population),
            delay: Duration::from_secs_f64(delay),
            clock: if self.real_clock.unwrap_or(false) {
                ClockMode::Real
            } else {
                ClockMode::Simulated
            },
            params: self.params,
        };
        config.engine_params()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Budget {
    /// Total evaluations including the initial design.
    Evaluations(usize),
    /// Synchronous iterations after the initial design.
    Iterations(usize),
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    pub dim: usize,
    pub algorithm: Algorithm,
    pub population: usize,
    pub budget: Budget,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    pub workers: usize,
    pub delay: Duration,
    pub clock: ClockMode,
    pub params: ParamOverrides,
}

impl ExperimentConfig {
    /// A config with defaults for everything but the problem.
    pub fn new(problem: &str, dim: usize) -> Result<Self> {
        PartialConfig {
            problem: Some(problem.into()),
            dim: Some(dim),
            ..Default::default()
        }
        .resolve()
    }

    pub fn engine_params(&self) -> Result<EngineParams> {
        let mut p = EngineParams::unchecked(self.dim, 0, self.population);
        self.params.apply(&mut p);
        p.total_evals = match self.budget {
            Budget::Evaluations(e) => e,
            Budget::Iterations(w) => p.init_evals + w * self.population,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn problem(&self) -> Result<SharedProblem> {
        let base: SharedProblem = Arc::new(problems::benchmark(&self.problem, self.dim)?);
        if self.delay.is_zero() {
            return Ok(base);
        }
        Ok(Arc::new(
            ExpensiveProblem::new(base, self.delay).sleeping(self.clock == ClockMode::Real),
        ))
    }

    pub fn problem_label(&self) -> String {
        format!("{}-d{}", self.problem, self.dim)
    }
}
