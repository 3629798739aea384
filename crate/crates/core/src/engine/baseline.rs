//! Random search with the same initial design and batch size as MOPLS.

use std::ops::ControlFlow;

use rand::Rng;

use super::{
    admit_initial_design, check_evaluator, Algorithm, EngineParams, IterationRow, Observer,
    RunFailure, RunTrace,
};
use crate::domain::{DecisionVector, ObjectiveVector};
use crate::error::{Error, Result};
use crate::parallel::BatchEvaluator;
use crate::sampling::RngStream;

/// Evaluates the Latin hypercube design, then batches of `population`
/// uniform points drawn from the master stream until the budget is spent.
pub fn random_search<E: BatchEvaluator>(
    params: &EngineParams,
    evaluator: &mut E,
    seed: u64,
    observer: &mut Observer<'_>,
) -> std::result::Result<RunTrace, RunFailure> {
    let mut trace = RunTrace::new(
        Algorithm::RandomSearch,
        params,
        seed,
        params.dim,
        evaluator.n_objectives(),
    );
    let outcome = (|| -> Result<()> {
        check_evaluator(params, evaluator)?;
        let mut rng = RngStream::master(seed);
        admit_initial_design(&mut trace, evaluator, &mut rng)?;
        if observer(&trace.rows[0], &trace.archive).is_break() {
            return Ok(());
        }
        let mut iteration = 0;
        while trace.archive.len() < params.total_evals {
            iteration += 1;
            let batch: Vec<DecisionVector> = (0..params.population)
                .map(|_| DecisionVector::clipped((0..params.dim).map(|_| rng.random()).collect()))
                .collect();
            let result = evaluator.evaluate_batch(batch)?;
            let mut new_ids = Vec::with_capacity(result.outputs.len());
            for (worker, (x, values)) in result.outputs.into_iter().enumerate() {
                let y = ObjectiveVector::new(values.clone()).map_err(|_| {
                    Error::NonFiniteEvaluation {
                        iteration,
                        worker,
                        values,
                    }
                })?;
                new_ids.push(trace.archive.push(x, y, params.r_init)?);
            }
            let mut row = IterationRow::summarize(&trace.archive, iteration);
            row.new_ids = new_ids;
            trace.rows.push(row);
            if let ControlFlow::Break(()) =
                observer(trace.rows.last().expect("just pushed"), &trace.archive)
            {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::Executor;
    use crate::problems;

    #[test]
    fn spends_budget_in_batches() {
        let params = EngineParams::new(4, 30, 4).unwrap();
        let mut ex = Executor::new(problems::by_name("zdt1-d4").unwrap(), 2).unwrap();
        let trace =
            random_search(&params, &mut ex, 3, &mut |_, _| ControlFlow::Continue(())).unwrap();
        // 10 initial points, then 5 batches of 4.
        assert_eq!(trace.archive.len(), 30);
        assert_eq!(trace.iterations(), 5);
        assert_eq!(ex.wall_units(), 5);
        assert_eq!(ex.batches(), 6);
        trace.archive.check_invariants().unwrap();
    }
}
