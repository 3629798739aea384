//! The built-in benchmark families, their Pareto fronts and ideal volumes.

use mopls::bench::metrics::ideal_hypervolume;
use mopls::problems::{self, FAMILIES};

fn main() -> mopls::Result<()> {
    println!("{:<8} {:>22} {:>12} {:>10}", "problem", "f(centre)", "front size", "ideal HV");
    for family in FAMILIES {
        let problem = problems::by_name(&format!("{family}-d8"))?;
        let y = problem
            .evaluate(&vec![0.5; problem.dim()])
            .map_err(|e| mopls::Error::Config(e.to_string()))?;
        let front = problem.pareto_front(1000).unwrap_or_default();
        let reference = problem.reporting_ref();
        let ideal = ideal_hypervolume(problem.as_ref(), &reference)?.unwrap_or(f64::NAN);
        println!(
            "{:<8} {:>22} {:>12} {:>10.4}",
            family,
            format!("({:.3}, {:.3})", y[0], y[1]),
            front.len(),
            ideal
        );
    }
    Ok(())
}
