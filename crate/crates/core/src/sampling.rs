//! Seeded random streams and Latin hypercube designs.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::DecisionVector;

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Stream 0 belongs to the master. Workers get one stream per
/// `(iteration, worker)` pair via [`RngStream::worker`], so results do not
/// depend on which thread runs which worker.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn master(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    /// Stream for worker `worker` (0-based) in iteration `iteration`.
    pub fn worker(seed: u64, iteration: usize, worker: usize) -> Self {
        let id = ((iteration as u64) << 32) | (worker as u64 + 1);
        Self::new(seed, id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Plain Latin hypercube design of `n` points in `[0,1]^d`: in every
/// dimension each stratum `[j/n, (j+1)/n)` holds exactly one point.
pub fn latin_hypercube<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Vec<DecisionVector> {
    let mut coords = vec![vec![0.0; d]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..d {
        strata.shuffle(rng);
        for (i, &s) in strata.iter().enumerate() {
            let u: f64 = rng.random();
            // Guard against rounding up to the next stratum.
            coords[i][j] = ((s as f64 + u) / n as f64).min((s as f64 + 1.0) / n as f64 - f64::EPSILON);
        }
    }
    coords.into_iter().map(DecisionVector::clipped).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stratum(v: f64, n: usize) -> usize {
        ((v * n as f64).floor() as usize).min(n - 1)
    }

    #[test]
    fn one_point_per_stratum() {
        let mut rng = RngStream::master(11);
        for (n, d) in [(4, 2), (18, 8), (50, 24), (1, 3)] {
            let design = latin_hypercube(n, d, &mut rng);
            assert_eq!(design.len(), n);
            for j in 0..d {
                let mut seen = vec![0; n];
                for p in &design {
                    seen[stratum(p[j], n)] += 1;
                }
                assert!(seen.iter().all(|&c| c == 1), "n={n} d={d} dim {j}: {seen:?}");
            }
        }
    }

    #[test]
    fn same_seed_same_design() {
        let a = latin_hypercube(6, 3, &mut RngStream::master(5));
        let b = latin_hypercube(6, 3, &mut RngStream::master(5));
        let c = latin_hypercube(6, 3, &mut RngStream::master(6));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn marginal_means_near_half() {
        let mut rng = RngStream::master(2024);
        let designs = 10_000;
        let n = 8;
        let mut sums = [0.0; 2];
        for _ in 0..designs {
            for p in latin_hypercube(n, 2, &mut rng) {
                sums[0] += p[0];
                sums[1] += p[1];
            }
        }
        for s in sums {
            let mean = s / (designs * n) as f64;
            assert!((mean - 0.5).abs() < 0.02, "{mean}");
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = RngStream::worker(1, 0, 0);
        let mut b = RngStream::worker(1, 0, 1);
        let mut c = RngStream::worker(1, 1, 0);
        let xa = a.next_u64();
        assert_ne!(xa, b.next_u64());
        assert_ne!(xa, c.next_u64());
        assert_eq!(RngStream::worker(1, 0, 0).next_u64(), xa);
    }
}
