//! A costly two-objective simulator under a fixed wall-clock budget: one
//! worker against eight, with the clock simulated instead of slept.

use mopls::bench::metrics::{hypervolume_coverage, ideal_hypervolume};
use mopls::engine::{EngineParams, Mopls};
use mopls::parallel::{ClockMode, Executor};
use mopls::problems::{ExpensiveProblem, SharedProblem};
use std::sync::Arc;

const WALL_BUDGET: usize = 6;

fn main() -> mopls::Result<()> {
    let problem: SharedProblem = Arc::new(ExpensiveProblem::costly_synthetic());
    let reference = problem.reporting_ref();
    let ideal = ideal_hypervolume(problem.as_ref(), &reference)?.expect("known front");
    println!(
        "{}: d={}, {:?} per evaluation, {WALL_BUDGET} iterations",
        problem.name(),
        problem.dim(),
        problem.cost()
    );
    for workers in [1, 8] {
        let mut params = EngineParams::with_wall_budget(problem.dim(), WALL_BUDGET, workers)?;
        params.n_cand_factor = 50;
        let mut executor =
            Executor::new(problem.clone(), workers)?.with_mode(ClockMode::Simulated);
        let trace = Mopls::new(params)
            .run(&mut executor, 11)
            .map_err(|f| f.error)?;
        let initial: Vec<_> = trace
            .initial_pareto_ids()
            .iter()
            .map(|&id| trace.archive.points()[id].objectives.clone())
            .collect();
        let ideal_front = problem.pareto_front(1000).expect("known front");
        let hc = hypervolume_coverage(&trace.final_pareto(), &initial, &ideal_front, &reference)?;
        println!(
            "N={workers}: {} evaluations, {} wall units, simulated {:?}, H_c {hc:.4} (ideal HV {ideal:.3})",
            trace.archive.len(),
            executor.wall_units(),
            executor.elapsed(),
        );
    }
    Ok(())
}
