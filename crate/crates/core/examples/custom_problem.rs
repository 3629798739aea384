//! Plug in a user-defined three-objective problem and track its progress
//! through an observer.

use std::ops::ControlFlow;
use std::sync::Arc;

use mopls::domain::ObjectiveVector;
use mopls::engine::{EngineParams, IterationRow, Mopls};
use mopls::hypervolume::{hv_exact, ReferenceVector};
use mopls::parallel::Executor;
use mopls::problems::{EvalFailure, Problem};
use mopls::EvaluationArchive;

/// Points on the positive unit sphere octant, pushed outward by `g`.
struct SphereFront {
    dim: usize,
}

impl Problem for SphereFront {
    fn name(&self) -> String {
        format!("sphere3-d{}", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn n_objectives(&self) -> usize {
        3
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalFailure> {
        use std::f64::consts::FRAC_PI_2;
        let g: f64 = x[2..].iter().map(|v| (v - 0.5).powi(2)).sum();
        let (a, b) = (x[0] * FRAC_PI_2, x[1] * FRAC_PI_2);
        Ok(vec![
            (1.0 + g) * a.cos() * b.cos(),
            (1.0 + g) * a.cos() * b.sin(),
            (1.0 + g) * a.sin(),
        ])
    }

    fn pareto_front(&self, n: usize) -> Option<Vec<ObjectiveVector>> {
        let side = (n as f64).sqrt().ceil() as usize;
        let mut front = Vec::with_capacity(side * side);
        for i in 0..side {
            for j in 0..side {
                let mut x = vec![0.5; self.dim];
                x[0] = i as f64 / (side - 1) as f64;
                x[1] = j as f64 / (side - 1) as f64;
                front.push(ObjectiveVector::new(self.evaluate(&x).ok()?).ok()?);
            }
        }
        Some(front)
    }

    fn reporting_ref(&self) -> ReferenceVector {
        ReferenceVector::new(vec![2.0; 3])
    }
}

fn main() -> mopls::Result<()> {
    let problem = Arc::new(SphereFront { dim: 6 });
    let reference = problem.reporting_ref();
    let ideal = hv_exact(&problem.pareto_front(400).expect("front"), &reference)?;
    let mut params = EngineParams::new(6, 110, 4)?;
    params.n_cand_factor = 50;
    let mut executor = Executor::new(problem, 4)?;
    let mut observer = |row: &IterationRow, archive: &EvaluationArchive| {
        if row.iteration % 5 == 0 {
            let hv = hv_exact(&archive.pareto_objectives(), &reference).unwrap_or(f64::NAN);
            println!(
                "iteration {:>3}  evaluations {:>4}  Pareto {:>3}  HV {hv:.4} of {ideal:.4}",
                row.iteration,
                row.evaluations,
                row.pareto_ids.len()
            );
        }
        ControlFlow::Continue(())
    };
    let trace = Mopls::new(params)
        .run_observed(&mut executor, 5, &mut observer)
        .map_err(|f| f.error)?;
    println!("finished with {} evaluations", trace.archive.len());
    Ok(())
}
