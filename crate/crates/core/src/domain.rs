//! Decision and objective vectors, Pareto dominance, and the archive of
//! expensively evaluated points.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the unit cube `[0,1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for (index, &value) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfBounds { index, value });
            }
        }
        Ok(Self(coords))
    }

    /// Clamps every coordinate into `[0, 1]`. NaN becomes 0.
    pub fn clipped(mut coords: Vec<f64>) -> Self {
        for c in &mut coords {
            *c = if c.is_nan() { 0.0 } else { c.clamp(0.0, 1.0) };
        }
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn distance(&self, other: &[f64]) -> f64 {
        squared_distance(&self.0, other).sqrt()
    }
}

impl Deref for DecisionVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for DecisionVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Objective values of one evaluation. All objectives are minimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ObjectiveVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for ObjectiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Per-point search memory: local search radius, failure count and tabu count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryAttributes {
    pub radius: f64,
    pub failure_count: u32,
    pub tabu_count: u32,
}

impl MemoryAttributes {
    pub fn fresh(radius: f64) -> Self {
        Self {
            radius,
            failure_count: 0,
            tabu_count: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedPoint {
    pub id: usize,
    pub decision: DecisionVector,
    pub objectives: ObjectiveVector,
    pub memory: MemoryAttributes,
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `a` dominates `b` when it is no worse everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    check_len(a, b)?;
    Ok(dominates_unchecked(a, b))
}

#[inline]
pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn check_uniform<P: AsRef<[f64]>>(points: &[P]) -> Result<()> {
    if let Some(first) = points.first() {
        let k = first.as_ref().len();
        for p in points {
            if p.as_ref().len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: p.as_ref().len(),
                });
            }
        }
    }
    Ok(())
}

/// Indices of the points not dominated by any other point, in ascending order.
///
/// Identical vectors do not dominate each other, so duplicates of a
/// non-dominated vector are all kept.
pub fn non_dominated_subset<P: AsRef<[f64]>>(points: &[P]) -> Result<Vec<usize>> {
    check_uniform(points)?;
    let all: Vec<usize> = (0..points.len()).collect();
    Ok(non_dominated_among(points, &all))
}

/// Non-dominated members of `subset` (indices into `points`), ascending.
pub(crate) fn non_dominated_among<P: AsRef<[f64]>>(points: &[P], subset: &[usize]) -> Vec<usize> {
    if subset.is_empty() {
        return Vec::new();
    }
    let mut order = subset.to_vec();
    // Anything that dominates p sorts strictly before p lexicographically.
    order.sort_by(|&a, &b| lex_cmp(points[a].as_ref(), points[b].as_ref()).then(a.cmp(&b)));

    let k = points[order[0]].as_ref().len();
    let mut keep = if k == 2 {
        sweep_2d(points, &order)
    } else {
        let mut front: Vec<usize> = Vec::new();
        for &i in &order {
            let p = points[i].as_ref();
            if !front
                .iter()
                .any(|&j| dominates_unchecked(points[j].as_ref(), p))
            {
                front.push(i);
            }
        }
        front
    };
    keep.sort_unstable();
    keep
}

fn sweep_2d<P: AsRef<[f64]>>(points: &[P], order: &[usize]) -> Vec<usize> {
    let mut keep = Vec::new();
    // Smallest second objective over all lexicographically smaller distinct vectors.
    let mut best = f64::INFINITY;
    let mut start = 0;
    while start < order.len() {
        let head = points[order[start]].as_ref();
        let mut end = start + 1;
        while end < order.len() && points[order[end]].as_ref() == head {
            end += 1;
        }
        if head[1] < best {
            keep.extend_from_slice(&order[start..end]);
            best = head[1];
        }
        start = end;
    }
    keep
}

/// Peels successive non-dominated fronts.
///
/// With `limit = Some(n)` peeling stops as soon as the fronts found so far
/// cover at least `n` indices; otherwise the fronts partition every index.
pub fn non_dominated_sort<P: AsRef<[f64]>>(
    points: &[P],
    limit: Option<usize>,
) -> Result<Vec<Vec<usize>>> {
    check_uniform(points)?;
    let target = limit.unwrap_or(points.len()).min(points.len());
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    let mut covered = 0;
    while covered < target {
        let front = non_dominated_among(points, &remaining);
        covered += front.len();
        let taken: BTreeSet<usize> = front.iter().copied().collect();
        remaining.retain(|i| !taken.contains(i));
        fronts.push(front);
    }
    Ok(fronts)
}

/// Insertion-ordered archive of every expensively evaluated point, with the
/// Pareto and tabu index sets kept in step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationArchive {
    dim: usize,
    n_objectives: usize,
    points: Vec<EvaluatedPoint>,
    tabu_ids: BTreeSet<usize>,
    pareto_ids: BTreeSet<usize>,
}

impl EvaluationArchive {
    pub fn new(dim: usize, n_objectives: usize) -> Self {
        Self {
            dim,
            n_objectives,
            points: Vec::new(),
            tabu_ids: BTreeSet::new(),
            pareto_ids: BTreeSet::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_objectives(&self) -> usize {
        self.n_objectives
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[EvaluatedPoint] {
        &self.points
    }

    pub fn get(&self, id: usize) -> Result<&EvaluatedPoint> {
        self.points.get(id).ok_or(Error::UnknownId(id))
    }

    pub fn tabu_ids(&self) -> &BTreeSet<usize> {
        &self.tabu_ids
    }

    pub fn pareto_ids(&self) -> &BTreeSet<usize> {
        &self.pareto_ids
    }

    pub fn is_tabu(&self, id: usize) -> bool {
        self.tabu_ids.contains(&id)
    }

    pub fn pareto_objectives(&self) -> Vec<ObjectiveVector> {
        self.pareto_ids
            .iter()
            .map(|&i| self.points[i].objectives.clone())
            .collect()
    }

    /// Admits a new point with fresh memory `(radius, 0, 0)` and returns its id.
    pub fn push(
        &mut self,
        decision: DecisionVector,
        objectives: ObjectiveVector,
        radius: f64,
    ) -> Result<usize> {
        self.push_with_memory(decision, objectives, MemoryAttributes::fresh(radius))
    }

    /// Admits a point with explicit memory attributes. A positive tabu count
    /// places it on the tabu list.
    pub fn push_with_memory(
        &mut self,
        decision: DecisionVector,
        objectives: ObjectiveVector,
        memory: MemoryAttributes,
    ) -> Result<usize> {
        if decision.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: decision.dim(),
            });
        }
        if objectives.len() != self.n_objectives {
            return Err(Error::DimensionMismatch {
                expected: self.n_objectives,
                found: objectives.len(),
            });
        }
        if !(memory.radius > 0.0) {
            return Err(Error::InvalidParams(format!(
                "radius must be positive, got {}",
                memory.radius
            )));
        }
        let id = self.points.len();
        let dominated = self
            .pareto_ids
            .iter()
            .any(|&j| dominates_unchecked(&self.points[j].objectives, &objectives));
        if !dominated {
            let points = &self.points;
            self.pareto_ids
                .retain(|&j| !dominates_unchecked(&objectives, &points[j].objectives));
            self.pareto_ids.insert(id);
        }
        if memory.tabu_count > 0 {
            self.tabu_ids.insert(id);
        }
        self.points.push(EvaluatedPoint {
            id,
            decision,
            objectives,
            memory,
        });
        Ok(id)
    }

    pub(crate) fn memory_mut(&mut self, id: usize) -> Result<&mut MemoryAttributes> {
        self.points
            .get_mut(id)
            .map(|p| &mut p.memory)
            .ok_or(Error::UnknownId(id))
    }

    pub(crate) fn set_tabu(&mut self, id: usize, tabu: bool) {
        if tabu {
            self.tabu_ids.insert(id);
        } else {
            self.tabu_ids.remove(&id);
        }
    }

    /// Pareto set recomputed by brute force over the whole archive.
    pub fn pareto_ids_from_scratch(&self) -> BTreeSet<usize> {
        let objs: Vec<&[f64]> = self.points.iter().map(|p| &p.objectives[..]).collect();
        non_dominated_subset(&objs)
            .expect("archive vectors share one length")
            .into_iter()
            .collect()
    }

    /// Checks the tabu and Pareto bookkeeping; returns a description of the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for p in &self.points {
            if (p.memory.tabu_count > 0) != self.tabu_ids.contains(&p.id) {
                return Err(format!(
                    "point {} has tabu_count {} but tabu membership {}",
                    p.id,
                    p.memory.tabu_count,
                    self.tabu_ids.contains(&p.id)
                ));
            }
            if !(p.memory.radius > 0.0) {
                return Err(format!("point {} has radius {}", p.id, p.memory.radius));
            }
        }
        if let Some(&bad) = self.tabu_ids.iter().find(|&&i| i >= self.points.len()) {
            return Err(format!("tabu id {bad} is not in the archive"));
        }
        let scratch = self.pareto_ids_from_scratch();
        if scratch != self.pareto_ids {
            return Err(format!(
                "incremental Pareto set {:?} differs from recomputed {:?}",
                self.pareto_ids, scratch
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_subset(points: &[Vec<f64>]) -> Vec<usize> {
        (0..points.len())
            .filter(|&i| {
                !(0..points.len()).any(|j| j != i && dominates_unchecked(&points[j], &points[i]))
            })
            .collect()
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[1.0, 2.0], &[2.0, 3.0]).unwrap());
        assert!(!dominates(&[1.0, 2.0], &[1.0, 2.0]).unwrap());
        assert!(!dominates(&[1.0, 3.0], &[3.0, 1.0]).unwrap());
        assert!(matches!(
            dominates(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn subset_examples() {
        let pts = vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![3.0, 3.0]];
        assert_eq!(brute_subset(&pts), vec![0, 1]);
        assert_eq!(non_dominated_subset(&pts).unwrap(), vec![0, 1]);
        let empty: Vec<Vec<f64>> = vec![];
        assert!(non_dominated_subset(&empty).unwrap().is_empty());
        assert_eq!(non_dominated_subset(&[vec![5.0, 5.0]]).unwrap(), vec![0]);
    }

    #[test]
    fn duplicates_are_all_kept() {
        let pts = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![2.0, 0.5], vec![1.0, 1.0]];
        assert_eq!(non_dominated_subset(&pts).unwrap(), vec![0, 1, 2, 3]);
        let pts3 = vec![vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 2.0]];
        assert_eq!(non_dominated_subset(&pts3).unwrap(), vec![0, 1]);
    }

    #[test]
    fn sort_examples() {
        let pts = vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![3.0, 3.0], vec![4.0, 4.0]];
        assert_eq!(
            non_dominated_sort(&pts, None).unwrap(),
            vec![vec![0, 1], vec![2], vec![3]]
        );
        let chain: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, i as f64]).collect();
        assert_eq!(non_dominated_sort(&chain, None).unwrap().len(), 5);
        let mutual: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 5.0 - i as f64]).collect();
        assert_eq!(non_dominated_sort(&mutual, None).unwrap().len(), 1);
    }

    #[test]
    fn sort_stops_early_with_limit() {
        let chain: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, i as f64]).collect();
        assert_eq!(non_dominated_sort(&chain, Some(2)).unwrap(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn decision_vector_bounds() {
        assert!(DecisionVector::new(vec![0.0, 1.0]).is_ok());
        assert!(matches!(
            DecisionVector::new(vec![0.5, 1.5]),
            Err(Error::OutOfBounds { index: 1, .. })
        ));
        assert_eq!(&*DecisionVector::clipped(vec![-0.1, 1.2, f64::NAN]), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn objective_vector_rejects_non_finite() {
        assert!(matches!(
            ObjectiveVector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn archive_tracks_pareto_incrementally() {
        let mut archive = EvaluationArchive::new(1, 2);
        let objs = [[3.0, 3.0], [1.0, 2.0], [2.0, 1.0], [0.5, 0.5], [0.5, 0.5], [4.0, 0.1]];
        for (i, o) in objs.iter().enumerate() {
            let id = archive
                .push(
                    DecisionVector::new(vec![i as f64 / 10.0]).unwrap(),
                    ObjectiveVector::new(o.to_vec()).unwrap(),
                    0.2,
                )
                .unwrap();
            assert_eq!(id, i);
            archive.check_invariants().unwrap();
        }
        assert_eq!(archive.pareto_ids().iter().copied().collect::<Vec<_>>(), vec![3, 4, 5]);
    }

    #[test]
    fn archive_rejects_wrong_shapes() {
        let mut archive = EvaluationArchive::new(2, 2);
        let err = archive.push(
            DecisionVector::new(vec![0.1]).unwrap(),
            ObjectiveVector::new(vec![1.0, 1.0]).unwrap(),
            0.2,
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        assert!(matches!(archive.get(0), Err(Error::UnknownId(0))));
    }
}
