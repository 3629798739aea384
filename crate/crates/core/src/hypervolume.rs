//! Hypervolume of a set of objective vectors bounded by a reference vector,
//! leave-one-out contributions, and the improvement from adding one vector.
//!
//! Exact routines handle one to three objectives (a sorted sweep in 2-D and
//! slicing along the last objective in 3-D). Monte-Carlo estimators work for
//! any objective count.

use std::ops::Deref;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::dominates_unchecked;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReferenceVector(Vec<f64>);

impl ReferenceVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    /// Componentwise maximum of `points` pushed out by `margin` times the
    /// observed range (or by `margin` times the magnitude when the range is zero).
    pub fn from_worst<P: AsRef<[f64]>>(points: &[P], margin: f64) -> Option<Self> {
        let k = points.first()?.as_ref().len();
        let mut lo = vec![f64::INFINITY; k];
        let mut hi = vec![f64::NEG_INFINITY; k];
        for p in points {
            for (j, &v) in p.as_ref().iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        let values = lo
            .iter()
            .zip(&hi)
            .map(|(&l, &h)| {
                let span = h - l;
                let pad = if span > 0.0 { span } else { h.abs().max(1.0) };
                h + margin * pad
            })
            .collect();
        Some(Self(values))
    }
}

impl Deref for ReferenceVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn check_shapes<P: AsRef<[f64]>>(front: &[P], reference: &[f64]) -> Result<()> {
    for p in front {
        if p.as_ref().len() != reference.len() {
            return Err(Error::DimensionMismatch {
                expected: reference.len(),
                found: p.as_ref().len(),
            });
        }
    }
    Ok(())
}

fn strictly_below(p: &[f64], reference: &[f64]) -> bool {
    p.iter().zip(reference).all(|(a, b)| a < b)
}

/// Exact hypervolume for 1 to 3 objectives. Points not strictly below the
/// reference in every coordinate contribute nothing.
pub fn hv_exact<P: AsRef<[f64]>>(front: &[P], reference: &ReferenceVector) -> Result<f64> {
    check_shapes(front, reference)?;
    let k = reference.len();
    if !(1..=3).contains(&k) {
        return Err(Error::UnsupportedDimension(k));
    }
    let pts: Vec<&[f64]> = front
        .iter()
        .map(|p| p.as_ref())
        .filter(|p| strictly_below(p, reference))
        .collect();
    Ok(match k {
        1 => pts
            .iter()
            .map(|p| reference[0] - p[0])
            .fold(0.0, f64::max),
        2 => {
            let mut pairs: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
            area_2d(&mut pairs, reference[0], reference[1])
        }
        _ => volume_3d(&pts, reference),
    })
}

/// Area dominated by `pts` inside `[.., rx] x [.., ry]`; every point must lie strictly inside.
fn area_2d(pts: &mut [[f64; 2]], rx: f64, ry: f64) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = ry;
    for p in pts.iter() {
        if p[1] < ceiling {
            area += (rx - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

fn volume_3d(pts: &[&[f64]], reference: &[f64]) -> f64 {
    let mut order: Vec<&[f64]> = pts.to_vec();
    order.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut slice: Vec<[f64; 2]> = Vec::with_capacity(order.len());
    let mut volume = 0.0;
    for (i, p) in order.iter().enumerate() {
        slice.push([p[0], p[1]]);
        let next = order.get(i + 1).map_or(reference[2], |q| q[2]);
        let depth = next - p[2];
        if depth > 0.0 {
            let mut work = slice.clone();
            volume += area_2d(&mut work, reference[0], reference[1]) * depth;
        }
    }
    volume
}

/// Uniform Monte-Carlo estimate of the hypervolume, sampling the box spanned
/// by the componentwise minimum of the front and the reference.
pub fn hv_monte_carlo<P: AsRef<[f64]>, R: Rng + ?Sized>(
    front: &[P],
    reference: &ReferenceVector,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_shapes(front, reference)?;
    let pts: Vec<&[f64]> = front
        .iter()
        .map(|p| p.as_ref())
        .filter(|p| strictly_below(p, reference))
        .collect();
    if pts.is_empty() || samples == 0 {
        return Ok(0.0);
    }
    let k = reference.len();
    let mut lower = vec![f64::INFINITY; k];
    for p in &pts {
        for j in 0..k {
            lower[j] = lower[j].min(p[j]);
        }
    }
    let box_volume: f64 = (0..k).map(|j| reference[j] - lower[j]).product();
    let mut z = vec![0.0; k];
    let mut hits = 0usize;
    for _ in 0..samples {
        for j in 0..k {
            z[j] = rng.random_range(lower[j]..reference[j]);
        }
        if pts.iter().any(|p| weakly_dominates(p, &z)) {
            hits += 1;
        }
    }
    Ok(box_volume * hits as f64 / samples as f64)
}

#[inline]
fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Leave-one-out contributions `hv(front) - hv(front \ {y_i})` of a mutually
/// non-dominated front. Duplicated vectors contribute zero.
pub fn hv_contributions<P: AsRef<[f64]>>(
    front: &[P],
    reference: &ReferenceVector,
) -> Result<Vec<f64>> {
    check_shapes(front, reference)?;
    for (i, p) in front.iter().enumerate() {
        if front
            .iter()
            .any(|q| dominates_unchecked(q.as_ref(), p.as_ref()))
        {
            return Err(Error::DominatedMember { index: i });
        }
    }
    let total = hv_exact(front, reference)?;
    let mut rest: Vec<&[f64]> = Vec::with_capacity(front.len());
    let mut out = Vec::with_capacity(front.len());
    for i in 0..front.len() {
        rest.clear();
        rest.extend(
            front
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| q.as_ref()),
        );
        out.push((total - hv_exact(&rest, reference)?).max(0.0));
    }
    Ok(out)
}

/// Exact hypervolume gained by adding `candidate` to `front` (1 to 3 objectives).
pub fn hv_improvement_exact<P: AsRef<[f64]>>(
    front: &[P],
    candidate: &[f64],
    reference: &ReferenceVector,
) -> Result<f64> {
    if candidate.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            found: candidate.len(),
        });
    }
    if !adds_volume(front, candidate, reference) {
        return Ok(0.0);
    }
    let base = hv_exact(front, reference)?;
    let mut with: Vec<&[f64]> = front.iter().map(|p| p.as_ref()).collect();
    with.push(candidate);
    Ok((hv_exact(&with, reference)? - base).max(0.0))
}

/// Monte-Carlo estimate of the improvement, sampling uniformly in the box
/// between the candidate and the reference.
pub fn hv_improvement_mc<P: AsRef<[f64]>, R: Rng + ?Sized>(
    front: &[P],
    candidate: &[f64],
    reference: &ReferenceVector,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_shapes(front, reference)?;
    if candidate.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            found: candidate.len(),
        });
    }
    if samples == 0 || !adds_volume(front, candidate, reference) {
        return Ok(0.0);
    }
    let k = reference.len();
    let box_volume: f64 = (0..k).map(|j| reference[j] - candidate[j]).product();
    let mut z = vec![0.0; k];
    let mut free = 0usize;
    for _ in 0..samples {
        for j in 0..k {
            z[j] = rng.random_range(candidate[j]..reference[j]);
        }
        if !front.iter().any(|p| weakly_dominates(p.as_ref(), &z)) {
            free += 1;
        }
    }
    Ok(box_volume * free as f64 / samples as f64)
}

/// Hypervolume improvement: exact for up to three objectives, Monte-Carlo beyond.
pub fn hv_improvement<P: AsRef<[f64]>, R: Rng + ?Sized>(
    front: &[P],
    candidate: &[f64],
    reference: &ReferenceVector,
    mc_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if reference.len() <= 3 {
        hv_improvement_exact(front, candidate, reference)
    } else {
        hv_improvement_mc(front, candidate, reference, mc_samples, rng)
    }
}

/// True iff adding `candidate` strictly increases the hypervolume: it lies
/// strictly inside the reference box and no front member weakly dominates it.
/// Exact for any number of objectives.
pub fn adds_volume<P: AsRef<[f64]>>(front: &[P], candidate: &[f64], reference: &[f64]) -> bool {
    strictly_below(candidate, reference)
        && !front
            .iter()
            .any(|p| weakly_dominates(p.as_ref(), candidate))
}
