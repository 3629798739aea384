//! Parallel surrogate-assisted multi-objective local search (MOPLS).
//!
//! MOPLS minimizes `k` expensive black-box objectives over the unit cube
//! `[0,1]^d`. Each iteration the master ranks every evaluated point by
//! non-dominated sorting and hypervolume contribution, picks `N` centers,
//! and hands each to a worker. A worker fits local cubic RBF surrogates
//! around its center, scores thousands of Gaussian perturbations, and
//! returns one point for expensive evaluation. A memory archive of
//! per-point search radii, failure counts and tabu counts steers the next
//! round.
//!
//! The crate is organised by subsystem:
//!
//! * [`domain`] - decision/objective vectors, dominance, the evaluation archive
//! * [`hypervolume`] - exact (k <= 3) and Monte-Carlo hypervolume
//! * [`rbf`] - cubic radial basis function surrogates
//! * [`sampling`] - seeded random streams and Latin hypercube designs
//! * [`engine`] - center selection, worker search, memory archive, outer loop
//! * [`problems`] - ZDT and LZF benchmarks, a delayed "expensive" wrapper
//! * [`parallel`] - the synchronous batch executor
//! * [`bench`] - experiment runner, coverage / speed-up metrics, persistence, plots
//!
//! ```no_run
//! use mopls::engine::{EngineParams, Mopls};
//! use mopls::parallel::Executor;
//! use mopls::problems;
//!
//! let problem = problems::by_name("zdt1-d8").unwrap();
//! let params = EngineParams::new(8, 400, 4).unwrap();
//! let mut executor = Executor::new(problem.clone(), 4).unwrap();
//! let trace = Mopls::new(params).run(&mut executor, 7).unwrap();
//! println!("{} Pareto points", trace.archive.pareto_ids().len());
//! ```

pub mod bench;
pub mod domain;
pub mod engine;
pub mod error;
pub mod hypervolume;
pub mod parallel;
pub mod problems;
pub mod rbf;
pub mod sampling;

pub use domain::{
    dominates, non_dominated_sort, non_dominated_subset, DecisionVector, EvaluatedPoint,
    EvaluationArchive, MemoryAttributes, ObjectiveVector,
};
pub use error::{Error, Result};
pub use hypervolume::ReferenceVector;
