//! Memory archive and tabu list update after each batch.

use serde::{Deserialize, Serialize};

use super::EngineParams;
use crate::domain::{DecisionVector, EvaluationArchive, MemoryAttributes, ObjectiveVector};
use crate::error::{Error, Result};
use crate::hypervolume::{adds_volume, hv_improvement_exact, ReferenceVector};

/// Hypervolume gains at or below this count as no improvement.
pub const ZERO_IMPROVEMENT: f64 = 1e-12;

/// What one memory update did.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MemoryUpdate {
    /// Per new point: true when it did not improve the pre-batch front.
    pub failed: Vec<bool>,
    pub new_ids: Vec<usize>,
    pub entered_tabu: Vec<usize>,
    pub released: Vec<usize>,
}

/// Does adding `y` to `front` leave the hypervolume unchanged?
///
/// Exact hypervolume is used up to three objectives; beyond that the
/// dominance characterisation (inside the reference box and not weakly
/// dominated) decides, which is also exact.
pub fn is_zero_improvement(
    front: &[ObjectiveVector],
    y: &[f64],
    reference: &ReferenceVector,
) -> Result<bool> {
    if reference.len() <= 3 {
        Ok(hv_improvement_exact(front, y, reference)? <= ZERO_IMPROVEMENT)
    } else {
        Ok(!adds_volume(front, y, reference))
    }
}

/// Applies one batch to the archive.
///
/// Phase 1 halves the radius and bumps the failure count of every center
/// whose new point brought no hypervolume gain over `pareto_before`. Phase 2
/// walks every point that existed before this batch: tabu counts tick down
/// (leaving the tabu list at zero), and points whose failure count exceeds
/// `c_thresh` enter the tabu list with a reset radius and failure count.
/// Finally the new points are admitted with fresh memory.
pub fn update_memory_archive(
    archive: &mut EvaluationArchive,
    centers: &[usize],
    new_points: Vec<(DecisionVector, ObjectiveVector)>,
    pareto_before: &[ObjectiveVector],
    reference: &ReferenceVector,
    params: &EngineParams,
) -> Result<MemoryUpdate> {
    if centers.len() != new_points.len() {
        return Err(Error::InvalidParams(format!(
            "{} centers but {} new points",
            centers.len(),
            new_points.len()
        )));
    }
    for &c in centers {
        archive.get(c)?;
    }
    let mut update = MemoryUpdate::default();

    for (&parent, (_, y)) in centers.iter().zip(&new_points) {
        let failed = is_zero_improvement(pareto_before, y, reference)?;
        if failed {
            let memory = archive.memory_mut(parent)?;
            memory.radius /= 2.0;
            memory.failure_count += 1;
        }
        update.failed.push(failed);
    }

    for id in 0..archive.len() {
        let memory = archive.memory_mut(id)?;
        if memory.tabu_count > 0 {
            memory.tabu_count -= 1;
            if memory.tabu_count == 0 {
                archive.set_tabu(id, false);
                update.released.push(id);
            }
        } else if memory.failure_count > params.c_thresh {
            memory.tabu_count = params.c_tenure;
            memory.radius = params.r_init;
            memory.failure_count = 0;
            archive.set_tabu(id, true);
            update.entered_tabu.push(id);
        }
    }

    for (x, y) in new_points {
        let id = archive.push_with_memory(x, y, MemoryAttributes::fresh(params.r_init))?;
        update.new_ids.push(id);
    }
    Ok(update)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(x: f64, y: [f64; 2]) -> (DecisionVector, ObjectiveVector) {
        (
            DecisionVector::new(vec![x, x]).unwrap(),
            ObjectiveVector::new(y.to_vec()).unwrap(),
        )
    }

    fn setup(memory: MemoryAttributes) -> EvaluationArchive {
        let mut a = EvaluationArchive::new(2, 2);
        let (x, y) = point(0.5, [1.0, 1.0]);
        a.push_with_memory(x, y, memory).unwrap();
        a
    }

    fn params() -> EngineParams {
        EngineParams::new(2, 100, 1).unwrap()
    }

    #[test]
    fn failure_halves_radius() {
        let mut a = setup(MemoryAttributes::fresh(0.2));
        let front = a.pareto_objectives();
        let r = ReferenceVector::new(vec![3.0, 3.0]);
        let up =
            update_memory_archive(&mut a, &[0], vec![point(0.6, [2.0, 2.0])], &front, &r, &params())
                .unwrap();
        assert_eq!(up.failed, vec![true]);
        assert_eq!(a.points()[0].memory.radius, 0.1);
        assert_eq!(a.points()[0].memory.failure_count, 1);
        assert_eq!(a.points()[1].memory, MemoryAttributes::fresh(0.2));
        assert_eq!(up.new_ids, vec![1]);
    }

    #[test]
    fn success_leaves_memory_alone() {
        let mut a = setup(MemoryAttributes::fresh(0.2));
        let front = a.pareto_objectives();
        let r = ReferenceVector::new(vec![3.0, 3.0]);
        let up =
            update_memory_archive(&mut a, &[0], vec![point(0.6, [0.5, 2.0])], &front, &r, &params())
                .unwrap();
        assert_eq!(up.failed, vec![false]);
        assert_eq!(a.points()[0].memory, MemoryAttributes::fresh(0.2));
    }

    #[test]
    fn exceeding_threshold_enters_tabu() {
        let mut a = setup(MemoryAttributes {
            radius: 0.0125,
            failure_count: 4,
            tabu_count: 0,
        });
        let front = a.pareto_objectives();
        let r = ReferenceVector::new(vec![3.0, 3.0]);
        let up =
            update_memory_archive(&mut a, &[0], vec![point(0.6, [0.5, 2.0])], &front, &r, &params())
                .unwrap();
        assert_eq!(up.entered_tabu, vec![0]);
        assert_eq!(
            a.points()[0].memory,
            MemoryAttributes {
                radius: 0.2,
                failure_count: 0,
                tabu_count: 5
            }
        );
        assert!(a.is_tabu(0));
        a.check_invariants().unwrap();
    }

    #[test]
    fn last_tabu_tick_releases() {
        let mut a = setup(MemoryAttributes {
            radius: 0.2,
            failure_count: 0,
            tabu_count: 1,
        });
        assert!(a.is_tabu(0));
        let r = ReferenceVector::new(vec![3.0, 3.0]);
        let up = update_memory_archive(&mut a, &[], vec![], &[], &r, &params()).unwrap();
        assert_eq!(up.released, vec![0]);
        assert_eq!(a.points()[0].memory.tabu_count, 0);
        assert!(!a.is_tabu(0));
    }

    #[test]
    fn unknown_parent_is_rejected() {
        let mut a = setup(MemoryAttributes::fresh(0.2));
        let r = ReferenceVector::new(vec![3.0, 3.0]);
        let err = update_memory_archive(&mut a, &[9], vec![point(0.1, [0.0, 0.0])], &[], &r, &params());
        assert!(matches!(err, Err(Error::UnknownId(9))));
    }

    #[test]
    fn many_objectives_use_dominance_test() {
        let r = ReferenceVector::new(vec![1.0; 4]);
        let front = vec![ObjectiveVector::new(vec![0.5; 4]).unwrap()];
        assert!(is_zero_improvement(&front, &[0.6; 4], &r).unwrap());
        assert!(is_zero_improvement(&front, &[0.5; 4], &r).unwrap());
        assert!(!is_zero_improvement(&front, &[0.4, 0.9, 0.9, 0.9], &r).unwrap());
        assert!(is_zero_improvement(&[], &[0.4, 0.9, 0.9, 1.0], &r).unwrap());
    }
}
