//! Optimize ZDT1 in 8 dimensions with 4 parallel workers and 400 evaluations.

use mopls::bench::metrics::{coverage_from_volumes, ideal_hypervolume};
use mopls::engine::{EngineParams, Mopls};
use mopls::hypervolume::hv_exact;
use mopls::parallel::Executor;
use mopls::problems;

fn main() -> mopls::Result<()> {
    let problem = problems::by_name("zdt1-d8")?;
    let params = EngineParams::new(8, 400, 4)?;
    let mut executor = Executor::new(problem.clone(), 4)?;
    let trace = Mopls::new(params)
        .run(&mut executor, 7)
        .map_err(|failure| failure.error)?;

    let reference = problem.reporting_ref();
    let ideal = ideal_hypervolume(problem.as_ref(), &reference)?.expect("analytic front");
    let initial: Vec<_> = trace
        .initial_pareto_ids()
        .iter()
        .map(|&id| trace.archive.points()[id].objectives.clone())
        .collect();
    let hv_init = hv_exact(&initial, &reference)?;
    let hv_final = hv_exact(&trace.final_pareto(), &reference)?;

    println!("evaluations        {}", trace.archive.len());
    println!("iterations         {}", trace.iterations());
    println!("wall-clock units   {}", executor.wall_units());
    println!("Pareto points      {}", trace.archive.pareto_ids().len());
    println!("hypervolume        {hv_final:.4} (initial {hv_init:.4}, ideal {ideal:.4})");
    println!(
        "coverage H_c       {:.4}",
        coverage_from_volumes(hv_final, hv_init, ideal)?
    );
    Ok(())
}
