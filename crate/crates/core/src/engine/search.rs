//! Per-worker surrogate-assisted local search around one center.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::EngineParams;
use crate::domain::{
    non_dominated_subset, squared_distance, DecisionVector, EvaluatedPoint, EvaluationArchive,
    MemoryAttributes, ObjectiveVector,
};
use crate::error::{Error, Result};
use crate::hypervolume::{hv_improvement, ReferenceVector};
use crate::problems::Problem;
use crate::rbf::fit_all_objectives;

/// How a worker chose its point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Hypervolume,
    MaxMin,
    Mutation,
}

/// Read-only view of master state handed to every worker for one iteration.
#[derive(Debug, Clone, Copy)]
pub struct SearchContext<'a> {
    pub archive: &'a EvaluationArchive,
    pub pareto: &'a [ObjectiveVector],
    pub reference: &'a ReferenceVector,
    pub params: &'a EngineParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub point: DecisionVector,
    pub mode: SearchMode,
}

/// Gaussian perturbations of `center`, `n_cand_factor * d` of them.
///
/// With probability 1/2 every coordinate uses `sigma = radius`; otherwise
/// each coordinate gets its own `sigma_j = |a_j|`, `a_j ~ N(radius, radius^2/4)`.
/// Coordinates leaving the unit cube are clipped to the violated bound.
pub fn generate_candidates<R: Rng + ?Sized>(
    center: &[f64],
    radius: f64,
    n_cand_factor: usize,
    rng: &mut R,
) -> Vec<DecisionVector> {
    let d = center.len();
    let sigmas: Vec<f64> = if rng.random::<f64>() <= 0.5 {
        vec![radius; d]
    } else {
        let spread = Normal::new(radius, radius / 2.0).expect("radius is finite and positive");
        (0..d).map(|_| spread.sample(rng).abs()).collect()
    };
    let unit = Normal::new(0.0, 1.0).expect("standard normal");
    (0..n_cand_factor * d)
        .map(|_| {
            let coords = center
                .iter()
                .zip(&sigmas)
                .map(|(c, s)| c + s * unit.sample(rng))
                .collect();
            DecisionVector::clipped(coords)
        })
        .collect()
}

/// Gaussian or uniform mutation, chosen with equal probability. Each
/// coordinate mutates with probability `1/d`; if none was picked, one
/// coordinate chosen uniformly is forced to mutate.
pub fn mutate<R: Rng + ?Sized>(center: &[f64], sigma: f64, rng: &mut R) -> DecisionVector {
    let d = center.len();
    let gaussian = rng.random::<f64>() <= 0.5;
    let p = 1.0 / d as f64;
    let mut picked: Vec<bool> = (0..d).map(|_| rng.random::<f64>() < p).collect();
    if !picked.iter().any(|&b| b) {
        picked[rng.random_range(0..d)] = true;
    }
    let noise = Normal::new(0.0, sigma).expect("mutation sigma is finite and positive");
    let coords = center
        .iter()
        .zip(&picked)
        .map(|(&c, &hit)| match (hit, gaussian) {
            (false, _) => c,
            (true, true) => c + noise.sample(rng),
            (true, false) => rng.random::<f64>(),
        })
        .collect();
    DecisionVector::clipped(coords)
}

/// Index into `predicted` maximizing the hypervolume improvement over
/// `pareto`; ties go to the lowest index.
pub fn best_hypervolume<R: Rng + ?Sized>(
    predicted: &[Vec<f64>],
    pareto: &[ObjectiveVector],
    reference: &ReferenceVector,
    mc_samples: usize,
    rng: &mut R,
) -> Result<usize> {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, y) in predicted.iter().enumerate() {
        let gain = hv_improvement(pareto, y, reference, mc_samples, rng)?;
        if gain > best.1 {
            best = (i, gain);
        }
    }
    Ok(best.0)
}

/// Index into `candidates` of the point farthest (by minimum Euclidean
/// distance) from every evaluated point; ties go to the lowest index.
pub fn max_min(candidates: &[&DecisionVector], archive: &EvaluationArchive) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, c) in candidates.iter().enumerate() {
        let nearest = archive
            .points()
            .iter()
            .map(|p| squared_distance(&p.decision, c))
            .fold(f64::INFINITY, f64::min);
        if nearest > best.1 {
            best = (i, nearest);
        }
    }
    best.0
}

/// Chooses the next point to evaluate around `center` without evaluating it.
pub fn propose<R: Rng + ?Sized>(
    center: &EvaluatedPoint,
    ctx: &SearchContext<'_>,
    rng: &mut R,
) -> Result<Proposal> {
    let params = ctx.params;
    if rng.random::<f64>() > params.prob_cand {
        return Ok(Proposal {
            point: mutate(&center.decision, params.mutation_sigma, rng),
            mode: SearchMode::Mutation,
        });
    }
    let surrogates = fit_all_objectives(&center.decision, ctx.archive, params.training_cap)?;
    let candidates = generate_candidates(
        &center.decision,
        center.memory.radius,
        params.n_cand_factor,
        rng,
    );
    let predicted = surrogates.predict_batch(&candidates)?;
    let front = non_dominated_subset(&predicted)?;
    let front_points: Vec<&DecisionVector> = front.iter().map(|&i| &candidates[i]).collect();

    if rng.random::<f64>() <= params.prob_hv {
        let front_predictions: Vec<Vec<f64>> =
            front.iter().map(|&i| predicted[i].clone()).collect();
        let pick = best_hypervolume(
            &front_predictions,
            ctx.pareto,
            ctx.reference,
            params.mc_samples,
            rng,
        )?;
        Ok(Proposal {
            point: front_points[pick].clone(),
            mode: SearchMode::Hypervolume,
        })
    } else {
        let pick = max_min(&front_points, ctx.archive);
        Ok(Proposal {
            point: front_points[pick].clone(),
            mode: SearchMode::MaxMin,
        })
    }
}

/// A freshly evaluated point returned by a worker, tagged with its parent center.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerResult {
    pub parent: usize,
    pub decision: DecisionVector,
    pub objectives: ObjectiveVector,
    pub memory: MemoryAttributes,
    pub mode: SearchMode,
}

/// Full worker step: propose, evaluate, and retry once with a fresh draw if
/// the evaluation is not finite.
pub fn worker_search<R: Rng + ?Sized>(
    center: &EvaluatedPoint,
    ctx: &SearchContext<'_>,
    problem: &dyn Problem,
    iteration: usize,
    worker: usize,
    rng: &mut R,
) -> Result<WorkerResult> {
    let mut last = Vec::new();
    for _ in 0..2 {
        let proposal = propose(center, ctx, rng)?;
        let values = problem.evaluate(&proposal.point).map_err(|e| Error::Evaluation {
            index: worker,
            message: e.0,
        })?;
        match ObjectiveVector::new(values.clone()) {
            Ok(objectives) => {
                return Ok(WorkerResult {
                    parent: center.id,
                    decision: proposal.point,
                    objectives,
                    memory: MemoryAttributes::fresh(ctx.params.r_init),
                    mode: proposal.mode,
                })
            }
            Err(_) => last = values,
        }
    }
    Err(Error::NonFiniteEvaluation {
        iteration,
        worker,
        values: last,
    })
}
