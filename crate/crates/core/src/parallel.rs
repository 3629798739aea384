//! Synchronous master-worker batch evaluation.
//!
//! The master submits a batch, blocks until every point is evaluated and
//! receives the results in submission order. One batch is one unit of wall
//! clock time in simulated mode.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::domain::DecisionVector;
use crate::error::{Error, Result};
use crate::problems::SharedProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClockMode {
    /// One wall unit per batch; evaluation costs are added up, not slept.
    #[default]
    Simulated,
    /// Elapsed time is measured with the system clock.
    Real,
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    /// Raw objective values in submission order.
    pub outputs: Vec<(DecisionVector, Vec<f64>)>,
    /// Wall clock units consumed by this batch (always 1).
    pub wall_units: u64,
    /// Summed evaluation time over all points.
    pub cpu_time: Duration,
    /// Simulated or measured elapsed time of the batch.
    pub elapsed: Duration,
}

/// What the engine needs from an evaluator: a blocking batch call.
pub trait BatchEvaluator {
    fn dim(&self) -> usize;

    fn n_objectives(&self) -> usize;

    fn evaluate_batch(&mut self, points: Vec<DecisionVector>) -> Result<BatchResult>;

    /// Pool on which per-worker surrogate searches should run.
    fn worker_pool(&self) -> Option<&ThreadPool> {
        None
    }

    /// Called once the initial design is evaluated; the wall clock counts
    /// iterations from here on.
    fn begin_iterations(&mut self) {}
}

/// Thread-pool executor over a shared problem.
pub struct Executor {
    problem: SharedProblem,
    workers: usize,
    pool: ThreadPool,
    mode: ClockMode,
    batches: u64,
    clock_origin: u64,
    elapsed: Duration,
    evaluations: usize,
}

impl Executor {
    pub fn new(problem: SharedProblem, workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidParams("worker count must be positive".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
        Ok(Self {
            problem,
            workers,
            pool,
            mode: ClockMode::Simulated,
            batches: 0,
            clock_origin: 0,
            elapsed: Duration::ZERO,
            evaluations: 0,
        })
    }

    pub fn with_mode(mut self, mode: ClockMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn problem(&self) -> &SharedProblem {
        &self.problem
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Batches evaluated since the initial design (all batches if the
    /// engine never signalled the start of its iterations).
    pub fn wall_units(&self) -> u64 {
        self.batches - self.clock_origin
    }

    /// Every batch evaluated, the initial design included.
    pub fn batches(&self) -> u64 {
        self.batches
    }

    /// Total simulated (or measured) elapsed time.
    pub fn elapsed(&self) -> Duration {
        self.elapsed
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }
}

impl BatchEvaluator for Executor {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn n_objectives(&self) -> usize {
        self.problem.n_objectives()
    }

    fn evaluate_batch(&mut self, points: Vec<DecisionVector>) -> Result<BatchResult> {
        if points.is_empty() {
            return Err(Error::InvalidParams("empty batch".into()));
        }
        let started = Instant::now();
        let problem = &self.problem;
        let results: Vec<_> = self.pool.install(|| {
            points
                .par_iter()
                .map(|x| {
                    let t = Instant::now();
                    let out = problem.evaluate(x);
                    (out, t.elapsed())
                })
                .collect()
        });
        let mut outputs = Vec::with_capacity(points.len());
        let mut cpu_time = Duration::ZERO;
        for (index, (x, (out, spent))) in points.into_iter().zip(results).enumerate() {
            cpu_time += spent;
            let values = out.map_err(|e| Error::Evaluation {
                index,
                message: e.0,
            })?;
            outputs.push((x, values));
        }
        let elapsed = match self.mode {
            ClockMode::Simulated => {
                let waves = outputs.len().div_ceil(self.workers) as u32;
                self.problem.cost() * waves
            }
            ClockMode::Real => started.elapsed(),
        };
        self.batches += 1;
        self.elapsed += elapsed;
        self.evaluations += outputs.len();
        Ok(BatchResult {
            outputs,
            wall_units: 1,
            cpu_time,
            elapsed,
        })
    }

    fn worker_pool(&self) -> Option<&ThreadPool> {
        Some(&self.pool)
    }

    fn begin_iterations(&mut self) {
        self.clock_origin = self.batches;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{self, EvalFailure, ExpensiveProblem, Problem};
    use crate::sampling::{latin_hypercube, RngStream};
    use crate::ReferenceVector;
    use std::sync::Arc;

    #[test]
    fn batch_of_four() {
        let mut ex = Executor::new(problems::by_name("zdt1-d8").unwrap(), 4).unwrap();
        let pts = latin_hypercube(4, 8, &mut RngStream::master(0));
        let res = ex.evaluate_batch(pts.clone()).unwrap();
        assert_eq!(res.outputs.len(), 4);
        assert_eq!(res.wall_units, 1);
        assert_eq!(ex.wall_units(), 1);
        for (p, (x, _)) in pts.iter().zip(&res.outputs) {
            assert_eq!(p, x);
        }
    }

    #[test]
    fn outputs_independent_of_worker_count() {
        let pts = latin_hypercube(64, 8, &mut RngStream::master(1));
        let problem = problems::by_name("lzf3-d8").unwrap();
        let a = Executor::new(problem.clone(), 8)
            .unwrap()
            .evaluate_batch(pts.clone())
            .unwrap();
        let b = Executor::new(problem, 64).unwrap().evaluate_batch(pts).unwrap();
        assert_eq!(a.outputs, b.outputs);
    }

    #[test]
    fn simulated_clock_counts_waves() {
        let inner = problems::by_name("zdt1-d15").unwrap();
        let slow: SharedProblem = Arc::new(ExpensiveProblem::new(inner, Duration::from_secs(10)));
        let mut ex = Executor::new(slow, 4).unwrap();
        let pts = latin_hypercube(4, 15, &mut RngStream::master(2));
        let res = ex.evaluate_batch(pts.clone()).unwrap();
        assert_eq!(res.elapsed, Duration::from_secs(10));
        let mut narrow = Executor::new(ex.problem().clone(), 2).unwrap();
        assert_eq!(narrow.evaluate_batch(pts).unwrap().elapsed, Duration::from_secs(20));
    }

    struct Flaky;

    impl Problem for Flaky {
        fn name(&self) -> String {
            "flaky".into()
        }
        fn dim(&self) -> usize {
            1
        }
        fn n_objectives(&self) -> usize {
            2
        }
        fn evaluate(&self, x: &[f64]) -> std::result::Result<Vec<f64>, EvalFailure> {
            if x[0] > 0.5 {
                Err(EvalFailure("simulator crashed".into()))
            } else {
                Ok(vec![x[0], 1.0 - x[0]])
            }
        }
        fn reporting_ref(&self) -> ReferenceVector {
            ReferenceVector::new(vec![2.0, 2.0])
        }
    }

    #[test]
    fn failure_names_point_index() {
        let mut ex = Executor::new(Arc::new(Flaky), 2).unwrap();
        let pts: Vec<_> = [0.1, 0.2, 0.9]
            .iter()
            .map(|&v| DecisionVector::new(vec![v]).unwrap())
            .collect();
        match ex.evaluate_batch(pts) {
            Err(Error::Evaluation { index, message }) => {
                assert_eq!(index, 2);
                assert!(message.contains("crashed"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
