//! Hypervolume coverage and speed-up.

use crate::domain::{non_dominated_subset, ObjectiveVector};
use crate::error::{Error, Result};
use crate::hypervolume::{hv_exact, ReferenceVector};
use crate::problems::Problem;

/// Number of analytic front samples used for the ideal hypervolume.
pub const IDEAL_FRONT_SAMPLES: usize = 1000;

/// `(hv - hv_init) / (hv_ideal - hv_init)`.
pub fn coverage_from_volumes(hv: f64, hv_init: f64, hv_ideal: f64) -> Result<f64> {
    if !(hv_ideal > hv_init) {
        return Err(Error::MetricUndefined(format!(
            "ideal hypervolume {hv_ideal} does not exceed the initial design's {hv_init}"
        )));
    }
    Ok((hv - hv_init) / (hv_ideal - hv_init))
}

/// Fraction of the hypervolume gap between the initial-design front
/// `initial` and the ideal front `ideal` that `front` closes.
pub fn hypervolume_coverage<P: AsRef<[f64]>>(
    front: &[P],
    initial: &[P],
    ideal: &[P],
    reference: &ReferenceVector,
) -> Result<f64> {
    coverage_from_volumes(
        hv_exact(front, reference)?,
        hv_exact(initial, reference)?,
        hv_exact(ideal, reference)?,
    )
}

/// Serial baseline time over parallel time.
pub fn speedup(baseline_time: f64, target_time: f64) -> Result<f64> {
    if !(baseline_time > 0.0 && target_time > 0.0) {
        return Err(Error::MetricUndefined(format!(
            "speed-up needs positive times, got {baseline_time} and {target_time}"
        )));
    }
    Ok(baseline_time / target_time)
}

/// Hypervolume of a problem's analytic front sample, if it has one.
pub fn ideal_hypervolume(problem: &dyn Problem, reference: &ReferenceVector) -> Result<Option<f64>> {
    match problem.pareto_front(IDEAL_FRONT_SAMPLES) {
        Some(front) => Ok(Some(hv_exact(&front, reference)?)),
        None => Ok(None),
    }
}

/// Non-dominated union of several fronts, the stand-in ideal when no
/// analytic front exists.
pub fn union_front(fronts: &[Vec<ObjectiveVector>]) -> Result<Vec<ObjectiveVector>> {
    let all: Vec<ObjectiveVector> = fronts.iter().flatten().cloned().collect();
    let keep = non_dominated_subset(&all)?;
    Ok(keep.into_iter().map(|i| all[i].clone()).collect())
}

/// First `x` whose value reaches `target`.
pub fn time_to_target(curve: &[(usize, f64)], target: f64) -> Option<usize> {
    curve.iter().find(|(_, v)| *v >= target).map(|(x, _)| *x)
}
