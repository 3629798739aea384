//! Center selection: rank evaluated points by non-dominated front, then by
//! hypervolume contribution within each front, skip tabu points and points
//! inside an already selected center's shrinking neighbourhood.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::EngineParams;
use crate::domain::{non_dominated_among, EvaluationArchive};
use crate::error::{Error, Result};
use crate::hypervolume::{hv_contributions, ReferenceVector};

/// Ids of the selected centers, in selection order, with the radius-rule
/// threshold that was in force.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterSelection {
    pub ids: Vec<usize>,
    pub threshold: f64,
}

/// Radius-rule threshold `1 - (m - E_I) / (E_T - E_I)`, clamped to `[0, 1]`.
pub fn d_thresh(m: usize, params: &EngineParams) -> f64 {
    if params.total_evals <= params.init_evals {
        return 0.0;
    }
    let span = (params.total_evals - params.init_evals) as f64;
    (1.0 - (m as f64 - params.init_evals as f64) / span).clamp(0.0, 1.0)
}

/// Selects exactly `params.population` centers.
///
/// If the ranked pass runs out of eligible points, a second pass over the
/// same ranking ignores the radius rule, and if that is still short the
/// best non-tabu points are reused in rank order.
pub fn select_centers(
    archive: &EvaluationArchive,
    params: &EngineParams,
    m: usize,
    iteration: usize,
    reference: &ReferenceVector,
) -> Result<CenterSelection> {
    if archive.points().iter().all(|p| archive.is_tabu(p.id)) {
        return Err(Error::SelectionStarvation { iteration });
    }
    let want = params.population;
    let threshold = d_thresh(m, params);
    let points = archive.points();
    let objectives: Vec<&[f64]> = points.iter().map(|p| &p.objectives[..]).collect();

    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut ranked: Vec<usize> = Vec::with_capacity(points.len());
    let mut selected: Vec<usize> = Vec::with_capacity(want);

    let next_front = |remaining: &mut Vec<usize>| -> Result<Vec<usize>> {
        let front = non_dominated_among(&objectives, remaining);
        let front_objs: Vec<&[f64]> = front.iter().map(|&i| objectives[i]).collect();
        let hc = hv_contributions(&front_objs, reference)?;
        let mut order: Vec<(usize, f64)> = front.iter().copied().zip(hc).collect();
        order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let taken: BTreeSet<usize> = front.into_iter().collect();
        remaining.retain(|i| !taken.contains(i));
        Ok(order.into_iter().map(|(i, _)| i).collect())
    };

    while selected.len() < want && !remaining.is_empty() {
        for id in next_front(&mut remaining)? {
            ranked.push(id);
            if selected.len() == want || archive.is_tabu(id) {
                continue;
            }
            let x = &points[id].decision;
            let crowded = selected.iter().any(|&c| {
                let center = &points[c];
                center.decision.distance(x) <= center.memory.radius * threshold
            });
            if !crowded {
                selected.push(id);
            }
        }
    }

    if selected.len() < want {
        while !remaining.is_empty() {
            ranked.extend(next_front(&mut remaining)?);
        }
        let eligible: Vec<usize> = ranked
            .iter()
            .copied()
            .filter(|&id| !archive.is_tabu(id))
            .collect();
        for &id in &eligible {
            if selected.len() == want {
                break;
            }
            if !selected.contains(&id) {
                selected.push(id);
            }
        }
        let mut cycle = eligible.iter().cycle();
        while selected.len() < want {
            selected.push(*cycle.next().expect("at least one non-tabu point"));
        }
    }

    Ok(CenterSelection {
        ids: selected,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{DecisionVector, MemoryAttributes, ObjectiveVector};

    fn archive(entries: &[([f64; 2], [f64; 2], u32)]) -> EvaluationArchive {
        let mut a = EvaluationArchive::new(2, 2);
        for (x, y, tabu) in entries {
            a.push_with_memory(
                DecisionVector::new(x.to_vec()).unwrap(),
                ObjectiveVector::new(y.to_vec()).unwrap(),
                MemoryAttributes {
                    radius: 0.2,
                    failure_count: 0,
                    tabu_count: *tabu,
                },
            )
            .unwrap();
        }
        a
    }

    fn params(n: usize) -> EngineParams {
        EngineParams::new(2, 100, n).unwrap()
    }

    #[test]
    fn threshold_endpoints() {
        let p = EngineParams {
            init_evals: 18,
            ..EngineParams::new(8, 400, 4).unwrap()
        };
        assert_eq!(d_thresh(18, &p), 1.0);
        assert_eq!(d_thresh(400, &p), 0.0);
        assert_eq!(d_thresh(209, &p), 0.5);
        assert_eq!(d_thresh(1000, &p), 0.0);
    }

    #[test]
    fn picks_first_front() {
        let a = archive(&[
            ([0.0, 0.0], [1.0, 2.0], 0),
            ([1.0, 1.0], [2.0, 1.0], 0),
            ([0.0, 1.0], [3.0, 3.0], 0),
        ]);
        let r = ReferenceVector::new(vec![4.0, 4.0]);
        let sel = select_centers(&a, &params(2), 6, 1, &r).unwrap();
        assert_eq!(sel.ids, vec![0, 1]);
    }

    #[test]
    fn tabu_member_is_skipped() {
        let a = archive(&[
            ([0.0, 0.0], [1.0, 2.0], 0),
            ([1.0, 1.0], [2.0, 1.0], 3),
            ([0.0, 1.0], [3.0, 3.0], 0),
        ]);
        let r = ReferenceVector::new(vec![4.0, 4.0]);
        let sel = select_centers(&a, &params(2), 6, 1, &r).unwrap();
        assert_eq!(sel.ids, vec![0, 2]);
    }

    #[test]
    fn single_center_is_best_contributor() {
        // Contributions w.r.t. (4,4) are 0.5, 4 and 0.5.
        let a = archive(&[
            ([0.0, 0.0], [0.5, 3.5], 0),
            ([0.5, 0.5], [1.5, 1.5], 0),
            ([1.0, 1.0], [3.5, 0.5], 0),
        ]);
        let r = ReferenceVector::new(vec![4.0, 4.0]);
        let sel = select_centers(&a, &params(1), 6, 1, &r).unwrap();
        assert_eq!(sel.ids, vec![1]);
    }

    #[test]
    fn radius_rule_then_fallback() {
        // Two front points almost on top of each other in decision space.
        let a = archive(&[
            ([0.5, 0.5], [1.0, 2.0], 0),
            ([0.51, 0.5], [2.0, 1.0], 0),
        ]);
        let r = ReferenceVector::new(vec![3.0, 3.0]);
        let p = params(2);
        // Threshold 1 at m = E_I: point 1 lies within 0.2 of point 0, skipped in
        // the first pass and admitted by the fallback pass.
        let sel = select_centers(&a, &p, p.init_evals, 1, &r).unwrap();
        assert_eq!(sel.ids, vec![0, 1]);
        // With more slots than points, the best point is reused.
        let sel = select_centers(&a, &params(3), p.init_evals, 1, &r).unwrap();
        assert_eq!(sel.ids, vec![0, 1, 0]);
    }

    #[test]
    fn all_tabu_starves() {
        let a = archive(&[([0.5, 0.5], [1.0, 2.0], 2)]);
        let r = ReferenceVector::new(vec![3.0, 3.0]);
        assert!(matches!(
            select_centers(&a, &params(1), 6, 7, &r),
            Err(Error::SelectionStarvation { iteration: 7 })
        ));
    }
}
