//! Cubic radial basis function interpolants with a linear polynomial tail.
//!
//! The model for one objective is
//! `s(x) = sum_i w_i * |x - c_i|^3 + t_0 + sum_j t_j * x_j`,
//! solved from the augmented system
//!
//! ```text
//! [ Phi  P ] [w]   [f]
//! [ P^T  0 ] [t] = [0]
//! ```
//!
//! When fewer than `d + 1` distinct inputs are available the tail drops to
//! a constant. If the system cannot be solved, a ridge term is added to the
//! diagonal and escalated tenfold until it can.

use std::collections::HashSet;
use std::ops::Deref;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::domain::{squared_distance, DecisionVector, EvaluatedPoint, EvaluationArchive};
use crate::error::{Error, Result};

const RIDGE_START: f64 = 1e-8;
const RIDGE_STEPS: usize = 14;
const ACCEPT_RESIDUAL: f64 = 1e-6;

/// Default cap on the local training set.
pub const DEFAULT_TRAINING_CAP: usize = 500;

#[derive(Debug, Clone)]
pub struct RbfSurrogate {
    centers: Arc<Vec<Vec<f64>>>,
    weights: Vec<f64>,
    tail: Vec<f64>,
    ridge: f64,
}

impl RbfSurrogate {
    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Linear tail `[t_0, t_1, .., t_d]`; the slope terms are zero when the
    /// fit fell back to a constant tail.
    pub fn tail(&self) -> &[f64] {
        &self.tail
    }

    /// Ridge term used in the final solve; zero for an exact interpolant.
    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn dim(&self) -> usize {
        self.tail.len() - 1
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let kernel: f64 = self
            .centers
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| w * cubic(squared_distance(c, x)))
            .sum();
        Ok(kernel + self.tail_at(x))
    }

    fn tail_at(&self, x: &[f64]) -> f64 {
        self.tail[0] + self.tail[1..].iter().zip(x).map(|(t, v)| t * v).sum::<f64>()
    }
}

#[inline]
fn cubic(squared: f64) -> f64 {
    let r = squared.sqrt();
    r * r * r
}

/// One surrogate per objective, all sharing the same centers.
#[derive(Debug, Clone)]
pub struct SurrogateSet {
    models: Vec<RbfSurrogate>,
}

impl SurrogateSet {
    /// Predicts every objective at `x`, computing the kernel row once.
    pub fn predict_all(&self, x: &[f64]) -> Result<Vec<f64>> {
        let Some(first) = self.models.first() else {
            return Ok(Vec::new());
        };
        if x.len() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: x.len(),
            });
        }
        let row: Vec<f64> = first
            .centers
            .iter()
            .map(|c| cubic(squared_distance(c, x)))
            .collect();
        Ok(self
            .models
            .iter()
            .map(|m| {
                m.weights.iter().zip(&row).map(|(w, p)| w * p).sum::<f64>() + m.tail_at(x)
            })
            .collect())
    }

    /// Predicts every objective at every point. Pairwise distances come from
    /// `|x|^2 + |c|^2 - 2 x.c`, so results can differ from [`Self::predict_all`]
    /// in the last few bits.
    pub fn predict_batch<X: AsRef<[f64]>>(&self, xs: &[X]) -> Result<Vec<Vec<f64>>> {
        let Some(first) = self.models.first() else {
            return Ok(vec![Vec::new(); xs.len()]);
        };
        let d = first.dim();
        for x in xs {
            if x.as_ref().len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: x.as_ref().len(),
                });
            }
        }
        let centers = &first.centers;
        let (n, m, k) = (centers.len(), xs.len(), self.models.len());
        let points = DMatrix::from_fn(m, d, |i, j| xs[i].as_ref()[j]);
        let c_t = DMatrix::from_fn(d, n, |j, i| centers[i][j]);
        let mut kernel = &points * &c_t;
        let x_norms: Vec<f64> = (0..m).map(|i| points.row(i).norm_squared()).collect();
        let c_norms: Vec<f64> = centers.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
        for (mut column, cn) in kernel.column_iter_mut().zip(&c_norms) {
            for (v, xn) in column.iter_mut().zip(&x_norms) {
                *v = cubic((xn + cn - 2.0 * *v).max(0.0));
            }
        }
        let weights = DMatrix::from_fn(n, k, |i, j| self.models[j].weights[i]);
        let values = kernel * weights;
        Ok((0..m)
            .map(|i| {
                let x = xs[i].as_ref();
                (0..k).map(|j| values[(i, j)] + self.models[j].tail_at(x)).collect()
            })
            .collect())
    }

    pub fn into_inner(self) -> Vec<RbfSurrogate> {
        self.models
    }
}

impl Deref for SurrogateSet {
    type Target = [RbfSurrogate];

    fn deref(&self) -> &[RbfSurrogate] {
        &self.models
    }
}

/// The `min(cap, m)` archive points nearest to `center`, ties broken by lower id.
pub fn select_training_set<'a>(
    center: &[f64],
    archive: &'a EvaluationArchive,
    cap: usize,
) -> Vec<&'a EvaluatedPoint> {
    let mut ranked: Vec<(f64, &EvaluatedPoint)> = archive
        .points()
        .iter()
        .map(|p| (squared_distance(&p.decision, center), p))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.id.cmp(&b.1.id)));
    ranked.truncate(cap);
    ranked.into_iter().map(|(_, p)| p).collect()
}

/// Fits a single-objective surrogate.
pub fn fit(training: &[(DecisionVector, f64)]) -> Result<RbfSurrogate> {
    let inputs: Vec<&[f64]> = training.iter().map(|(x, _)| &x[..]).collect();
    let values: Vec<Vec<f64>> = vec![training.iter().map(|(_, v)| *v).collect()];
    Ok(fit_shared(&inputs, &values)?.models.remove(0))
}

/// Fits local surrogates for every objective around `center`.
pub fn fit_all_objectives(
    center: &[f64],
    archive: &EvaluationArchive,
    cap: usize,
) -> Result<SurrogateSet> {
    let training = select_training_set(center, archive, cap);
    let inputs: Vec<&[f64]> = training.iter().map(|p| &p.decision[..]).collect();
    let values: Vec<Vec<f64>> = (0..archive.n_objectives())
        .map(|j| training.iter().map(|p| p.objectives[j]).collect())
        .collect();
    fit_shared(&inputs, &values)
}

/// Fits one model per column of `values` on the shared `inputs`, factorizing once.
pub fn fit_shared(inputs: &[&[f64]], values: &[Vec<f64>]) -> Result<SurrogateSet> {
    if inputs.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let d = inputs[0].len();
    for x in inputs {
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            });
        }
    }
    for column in values {
        if column.len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                found: column.len(),
            });
        }
    }

    // Collapse exact duplicates, keeping the first occurrence.
    let mut seen = HashSet::new();
    let keep: Vec<usize> = (0..inputs.len())
        .filter(|&i| seen.insert(inputs[i].iter().map(|v| v.to_bits()).collect::<Vec<_>>()))
        .collect();
    let centers: Vec<Vec<f64>> = keep.iter().map(|&i| inputs[i].to_vec()).collect();
    let targets: Vec<Vec<f64>> = values
        .iter()
        .map(|col| keep.iter().map(|&i| col[i]).collect())
        .collect();

    let n = centers.len();
    let q = if n > d { d + 1 } else { 1 };
    let size = n + q;
    let mut base = DMatrix::<f64>::zeros(size, size);
    let mut phi_max = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = cubic(squared_distance(&centers[i], &centers[j]));
            base[(i, j)] = v;
            base[(j, i)] = v;
            phi_max = phi_max.max(v);
        }
        base[(i, n)] = 1.0;
        base[(n, i)] = 1.0;
        for l in 1..q {
            base[(i, n + l)] = centers[i][l - 1];
            base[(n + l, i)] = centers[i][l - 1];
        }
    }
    let mut rhs = DMatrix::<f64>::zeros(size, targets.len());
    for (j, col) in targets.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            rhs[(i, j)] = *v;
        }
    }

    let scale = phi_max.max(1.0);
    let mut ridge = 0.0;
    for step in 0..=RIDGE_STEPS {
        if step > 0 {
            ridge = RIDGE_START * scale * 10f64.powi(step as i32 - 1);
        }
        let mut a = base.clone();
        for i in 0..n {
            a[(i, i)] += ridge;
        }
        for l in 0..q {
            a[(n + l, n + l)] -= ridge;
        }
        let Some(sol) = a.lu().solve(&rhs) else {
            continue;
        };
        if sol.iter().any(|v| !v.is_finite()) {
            continue;
        }
        if ridge == 0.0 && !interpolates(&base, &sol, &rhs, n) {
            continue;
        }
        let centers = Arc::new(centers);
        let models = (0..targets.len())
            .map(|j| {
                let weights = (0..n).map(|i| sol[(i, j)]).collect();
                let mut tail = vec![0.0; d + 1];
                for l in 0..q {
                    tail[l] = sol[(n + l, j)];
                }
                RbfSurrogate {
                    centers: Arc::clone(&centers),
                    weights,
                    tail,
                    ridge,
                }
            })
            .collect();
        return Ok(SurrogateSet { models });
    }
    Err(Error::RbfSolve { ridge })
}

fn interpolates(a: &DMatrix<f64>, sol: &DMatrix<f64>, rhs: &DMatrix<f64>, n: usize) -> bool {
    let fitted = a * sol;
    (0..rhs.ncols()).all(|j| {
        (0..n).all(|i| (fitted[(i, j)] - rhs[(i, j)]).abs() <= ACCEPT_RESIDUAL * (1.0 + rhs[(i, j)].abs()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ObjectiveVector;
    use crate::sampling::RngStream;
    use rand::Rng;

    fn dv(v: &[f64]) -> DecisionVector {
        DecisionVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_point_line() {
        let model = fit(&[(dv(&[0.0]), 0.0), (dv(&[1.0]), 1.0)]).unwrap();
        assert!((model.predict(&[0.5]).unwrap() - 0.5).abs() < 1e-8);
        assert!((model.predict(&[0.0]).unwrap()).abs() < 1e-8);
        assert!((model.predict(&[1.0]).unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(model.ridge(), 0.0);
    }

    #[test]
    fn interpolates_random_data() {
        let mut rng = RngStream::master(3);
        let d = 5;
        let training: Vec<(DecisionVector, f64)> = (0..40)
            .map(|_| {
                let x: Vec<f64> = (0..d).map(|_| rng.random()).collect();
                let v = x.iter().map(|c| (3.0 * c).sin()).sum::<f64>();
                (dv(&x), v)
            })
            .collect();
        let model = fit(&training).unwrap();
        for (x, v) in &training {
            assert!((model.predict(x).unwrap() - v).abs() <= 1e-8 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn reproduces_affine_functions() {
        let mut rng = RngStream::master(8);
        let d = 6;
        let a: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let c = 0.7;
        let f = |x: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + c;
        let training: Vec<(DecisionVector, f64)> = (0..=d)
            .map(|_| {
                let x: Vec<f64> = (0..d).map(|_| rng.random()).collect();
                let v = f(&x);
                (dv(&x), v)
            })
            .collect();
        let model = fit(&training).unwrap();
        for _ in 0..200 {
            let x: Vec<f64> = (0..d).map(|_| rng.random()).collect();
            assert!((model.predict(&x).unwrap() - f(&x)).abs() < 1e-6);
        }
    }

    #[test]
    fn empty_training_set_is_an_error() {
        assert!(matches!(fit(&[]), Err(Error::EmptyTrainingSet)));
    }

    #[test]
    fn duplicates_collapse_to_first() {
        let model = fit(&[
            (dv(&[0.2, 0.2]), 1.0),
            (dv(&[0.2, 0.2]), 5.0),
            (dv(&[0.8, 0.1]), 2.0),
        ])
        .unwrap();
        assert_eq!(model.centers().len(), 2);
        assert!((model.predict(&[0.2, 0.2]).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn near_collinear_cluster_still_fits() {
        let mut training = Vec::new();
        for i in 0..30 {
            let t = i as f64 / 29.0;
            let wobble = 1e-13 * (i % 3) as f64;
            training.push((dv(&[t, (t - wobble).max(0.0), 0.5]), t * t));
        }
        let model = fit(&training).unwrap();
        let p = model.predict(&[0.5, 0.5, 0.5]).unwrap();
        assert!(p.is_finite());
        assert!((p - 0.25).abs() < 0.05, "{p}");
    }

    #[test]
    fn batch_prediction_matches_pointwise() {
        let mut rng = RngStream::master(12);
        let d = 4;
        let inputs: Vec<Vec<f64>> =
            (0..30).map(|_| (0..d).map(|_| rng.random()).collect()).collect();
        let refs: Vec<&[f64]> = inputs.iter().map(|v| &v[..]).collect();
        let values = vec![
            inputs.iter().map(|x| x[0] * x[1]).collect(),
            inputs.iter().map(|x| (x[2] - x[3]).exp()).collect(),
        ];
        let set = fit_shared(&refs, &values).unwrap();
        let probes: Vec<Vec<f64>> =
            (0..50).map(|_| (0..d).map(|_| rng.random()).collect()).collect();
        let batch = set.predict_batch(&probes).unwrap();
        for (x, got) in probes.iter().zip(&batch) {
            let one = set.predict_all(x).unwrap();
            for (a, b) in one.iter().zip(got) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn dimension_mismatch_on_predict() {
        let model = fit(&[(dv(&[0.0, 0.0]), 1.0)]).unwrap();
        assert!(matches!(model.predict(&[0.1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn singleton_archive_predicts_its_values() {
        let mut archive = EvaluationArchive::new(3, 2);
        archive
            .push(dv(&[0.1, 0.2, 0.3]), ObjectiveVector::new(vec![4.0, -1.0]).unwrap(), 0.2)
            .unwrap();
        let set = fit_all_objectives(&[0.1, 0.2, 0.3], &archive, DEFAULT_TRAINING_CAP).unwrap();
        assert_eq!(set.len(), 2);
        let y = set.predict_all(&[0.1, 0.2, 0.3]).unwrap();
        assert!((y[0] - 4.0).abs() < 1e-12 && (y[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn training_set_cap_and_ties() {
        let mut archive = EvaluationArchive::new(1, 1);
        for x in [0.25, 0.75, 0.5, 0.9, 0.1] {
            archive
                .push(dv(&[x]), ObjectiveVector::new(vec![x]).unwrap(), 0.2)
                .unwrap();
        }
        let ids: Vec<usize> = select_training_set(&[0.5], &archive, 2)
            .iter()
            .map(|p| p.id)
            .collect();
        // 0.25 and 0.75 are equidistant from 0.5; the lower id wins the last slot.
        assert_eq!(ids, vec![2, 0]);
        assert_eq!(select_training_set(&[0.5], &archive, 500).len(), 5);
    }
}
