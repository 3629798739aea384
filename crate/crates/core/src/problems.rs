//! Benchmark problems on the unit cube.
//!
//! * ZDT1, ZDT2, ZDT3, ZDT4, ZDT6 (Zitzler, Deb and Thiele). ZDT4 maps
//!   coordinates 2..d from `[0,1]` to `[-5,5]` internally.
//! * LZF1..LZF6, the bi-objective members of the Li-Zhang (2009) set with
//!   complicated Pareto sets. LZF1..LZF5 are F1..F5 of that set; LZF6 is F7
//!   (F6 has three objectives and is skipped). Coordinates 2..d of LZF2..LZF5
//!   are mapped from `[0,1]` to `[-1,1]`.
//!
//! Every problem here has two objectives and a known front, sampled by
//! [`Problem::pareto_front`]. [`ExpensiveProblem`] adds an evaluation cost.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use crate::domain::ObjectiveVector;
use crate::error::{Error, Result};
use crate::hypervolume::ReferenceVector;

/// Reporting reference for every built-in benchmark.
pub const BENCHMARK_REFERENCE: [f64; 2] = [11.0, 11.0];

/// Failure raised by an evaluator for one point.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalFailure(pub String);

impl fmt::Display for EvalFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An expensive black-box multi-objective function on `[0,1]^d`.
pub trait Problem: Send + Sync {
    fn name(&self) -> String;

    fn dim(&self) -> usize;

    fn n_objectives(&self) -> usize;

    /// Raw objective values; may be non-finite for a misbehaving simulator.
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalFailure>;

    /// `n` points on the true Pareto front, when it is known.
    fn pareto_front(&self, _n: usize) -> Option<Vec<ObjectiveVector>> {
        None
    }

    /// Fixed reference vector for reporting hypervolume.
    fn reporting_ref(&self) -> ReferenceVector;

    /// Simulated cost of one evaluation.
    fn cost(&self) -> Duration {
        Duration::ZERO
    }
}

pub type SharedProblem = Arc<dyn Problem>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zdt {
    Zdt1,
    Zdt2,
    Zdt3,
    Zdt4,
    Zdt6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lzf {
    Lzf1,
    Lzf2,
    Lzf3,
    Lzf4,
    Lzf5,
    Lzf6,
}

/// One of the built-in benchmarks at a given dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Benchmark {
    Zdt(Zdt, usize),
    Lzf(Lzf, usize),
}

/// f1 ranges of the five disconnected ZDT3 front segments.
pub const ZDT3_SEGMENTS: [(f64, f64); 5] = [
    (0.0, 0.083_001_534_9),
    (0.182_228_728_0, 0.257_762_363_4),
    (0.409_313_674_8, 0.453_882_104_1),
    (0.618_396_794_4, 0.652_511_703_8),
    (0.823_331_798_3, 0.851_832_865_4),
];

/// Smallest attainable f1 of ZDT6.
pub const ZDT6_F1_MIN: f64 = 0.280_775_319_1;

impl Zdt {
    pub fn evaluate(self, x: &[f64]) -> [f64; 2] {
        let d = x.len();
        let tail = &x[1..];
        let f1 = match self {
            Zdt::Zdt6 => 1.0 - (-4.0 * x[0]).exp() * (6.0 * PI * x[0]).sin().powi(6),
            _ => x[0],
        };
        let g = match self {
            Zdt::Zdt4 => {
                let s: f64 = tail
                    .iter()
                    .map(|&u| {
                        let v = 10.0 * u - 5.0;
                        v * v - 10.0 * (4.0 * PI * v).cos()
                    })
                    .sum();
                1.0 + 10.0 * (d - 1) as f64 + s
            }
            Zdt::Zdt6 => 1.0 + 9.0 * (tail.iter().sum::<f64>() / (d - 1) as f64).powf(0.25),
            _ => 1.0 + 9.0 * tail.iter().sum::<f64>() / (d - 1) as f64,
        };
        let ratio = f1 / g;
        let h = match self {
            Zdt::Zdt1 | Zdt::Zdt4 => 1.0 - ratio.sqrt(),
            Zdt::Zdt2 | Zdt::Zdt6 => 1.0 - ratio * ratio,
            Zdt::Zdt3 => 1.0 - ratio.sqrt() - ratio * (10.0 * PI * f1).sin(),
        };
        [f1, g * h]
    }

    pub fn front(self, n: usize) -> Vec<[f64; 2]> {
        let even = |lo: f64, hi: f64, i: usize| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        match self {
            Zdt::Zdt1 | Zdt::Zdt4 => (0..n)
                .map(|i| {
                    let f1 = even(0.0, 1.0, i);
                    [f1, 1.0 - f1.sqrt()]
                })
                .collect(),
            Zdt::Zdt2 => (0..n)
                .map(|i| {
                    let f1 = even(0.0, 1.0, i);
                    [f1, 1.0 - f1 * f1]
                })
                .collect(),
            Zdt::Zdt6 => (0..n)
                .map(|i| {
                    let f1 = even(ZDT6_F1_MIN, 1.0, i);
                    [f1, 1.0 - f1 * f1]
                })
                .collect(),
            Zdt::Zdt3 => {
                let total: f64 = ZDT3_SEGMENTS.iter().map(|(a, b)| b - a).sum();
                (0..n)
                    .map(|i| {
                        let mut t = even(0.0, total, i);
                        let mut f1 = ZDT3_SEGMENTS[4].1;
                        for (a, b) in ZDT3_SEGMENTS {
                            if t <= b - a {
                                f1 = a + t;
                                break;
                            }
                            t -= b - a;
                        }
                        [f1, 1.0 - f1.sqrt() - f1 * (10.0 * PI * f1).sin()]
                    })
                    .collect()
            }
        }
    }
}

impl Lzf {
    /// Li-Zhang exponent for the curved Pareto sets of LZF1 and LZF6.
    fn power_set(x1: f64, j: usize, n: usize) -> f64 {
        x1.powf(0.5 * (1.0 + 3.0 * (j as f64 - 2.0) / (n as f64 - 2.0)))
    }

    /// Target value of coordinate `j` (1-based, `j >= 2`) on the Pareto set.
    pub fn pareto_set_coordinate(self, x1: f64, j: usize, n: usize) -> f64 {
        let odd = j % 2 == 1;
        let phase = 6.0 * PI * x1 + j as f64 * PI / n as f64;
        match self {
            Lzf::Lzf1 | Lzf::Lzf6 => Self::power_set(x1, j, n),
            Lzf::Lzf2 => phase.sin(),
            Lzf::Lzf3 => {
                if odd {
                    0.8 * x1 * phase.cos()
                } else {
                    0.8 * x1 * phase.sin()
                }
            }
            Lzf::Lzf4 => {
                if odd {
                    0.8 * x1 * (phase / 3.0).cos()
                } else {
                    0.8 * x1 * phase.sin()
                }
            }
            Lzf::Lzf5 => {
                let amp = 0.3 * x1 * x1 * (24.0 * PI * x1 + 4.0 * j as f64 * PI / n as f64).cos()
                    + 0.6 * x1;
                if odd {
                    amp * phase.cos()
                } else {
                    amp * phase.sin()
                }
            }
        }
    }

    fn wide_domain(self) -> bool {
        matches!(self, Lzf::Lzf2 | Lzf::Lzf3 | Lzf::Lzf4 | Lzf::Lzf5)
    }

    /// Maps unit-cube coordinates to the problem's native domain.
    pub fn to_native(self, x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        if self.wide_domain() {
            for c in &mut v[1..] {
                *c = 2.0 * *c - 1.0;
            }
        }
        v
    }

    /// Inverse of [`Lzf::to_native`].
    pub fn from_native(self, native: &[f64]) -> Vec<f64> {
        let mut v = native.to_vec();
        if self.wide_domain() {
            for c in &mut v[1..] {
                *c = (*c + 1.0) / 2.0;
            }
        }
        v
    }

    pub fn evaluate(self, x: &[f64]) -> [f64; 2] {
        let n = x.len();
        let v = self.to_native(x);
        let x1 = v[0];
        let (mut odd_sum, mut odd_n, mut even_sum, mut even_n) = (0.0, 0usize, 0.0, 0usize);
        for j in 2..=n {
            let y = v[j - 1] - self.pareto_set_coordinate(x1, j, n);
            let term = match self {
                Lzf::Lzf6 => 4.0 * y * y - (8.0 * y * PI).cos() + 1.0,
                _ => y * y,
            };
            if j % 2 == 1 {
                odd_sum += term;
                odd_n += 1;
            } else {
                even_sum += term;
                even_n += 1;
            }
        }
        let f1 = x1 + 2.0 * odd_sum / odd_n.max(1) as f64;
        let f2 = 1.0 - x1.sqrt() + 2.0 * even_sum / even_n.max(1) as f64;
        [f1, f2]
    }

    /// Every LZF front here is `f2 = 1 - sqrt(f1)` on `[0, 1]`.
    pub fn front(self, n: usize) -> Vec<[f64; 2]> {
        Zdt::Zdt1.front(n)
    }
}

impl Benchmark {
    pub fn min_dim(&self) -> usize {
        match self {
            Benchmark::Zdt(..) => 2,
            Benchmark::Lzf(..) => 3,
        }
    }
}

impl Problem for Benchmark {
    fn name(&self) -> String {
        match self {
            Benchmark::Zdt(z, d) => format!("{}-d{d}", format!("{z:?}").to_lowercase()),
            Benchmark::Lzf(l, d) => format!("{}-d{d}", format!("{l:?}").to_lowercase()),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Benchmark::Zdt(_, d) | Benchmark::Lzf(_, d) => *d,
        }
    }

    fn n_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalFailure> {
        if x.len() != self.dim() {
            return Err(EvalFailure(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                x.len()
            )));
        }
        Ok(match self {
            Benchmark::Zdt(z, _) => z.evaluate(x).to_vec(),
            Benchmark::Lzf(l, _) => l.evaluate(x).to_vec(),
        })
    }

    fn pareto_front(&self, n: usize) -> Option<Vec<ObjectiveVector>> {
        let pts = match self {
            Benchmark::Zdt(z, _) => z.front(n),
            Benchmark::Lzf(l, _) => l.front(n),
        };
        Some(
            pts.into_iter()
                .map(|p| ObjectiveVector::new(p.to_vec()).expect("analytic fronts are finite"))
                .collect(),
        )
    }

    fn reporting_ref(&self) -> ReferenceVector {
        ReferenceVector::new(BENCHMARK_REFERENCE.to_vec())
    }
}

/// Builds a benchmark from its family name and dimension.
pub fn benchmark(family: &str, dim: usize) -> Result<Benchmark> {
    let family = family.to_ascii_lowercase();
    let b = match family.as_str() {
        "zdt1" => Benchmark::Zdt(Zdt::Zdt1, dim),
        "zdt2" => Benchmark::Zdt(Zdt::Zdt2, dim),
        "zdt3" => Benchmark::Zdt(Zdt::Zdt3, dim),
        "zdt4" => Benchmark::Zdt(Zdt::Zdt4, dim),
        "zdt6" => Benchmark::Zdt(Zdt::Zdt6, dim),
        "lzf1" => Benchmark::Lzf(Lzf::Lzf1, dim),
        "lzf2" => Benchmark::Lzf(Lzf::Lzf2, dim),
        "lzf3" => Benchmark::Lzf(Lzf::Lzf3, dim),
        "lzf4" => Benchmark::Lzf(Lzf::Lzf4, dim),
        "lzf5" => Benchmark::Lzf(Lzf::Lzf5, dim),
        "lzf6" => Benchmark::Lzf(Lzf::Lzf6, dim),
        _ => return Err(Error::UnknownProblem(family)),
    };
    if dim < b.min_dim() {
        return Err(Error::InvalidParams(format!(
            "{family} needs at least {} decision variables, got {dim}",
            b.min_dim()
        )));
    }
    Ok(b)
}

/// Looks up a registered problem such as `"zdt1-d8"` or `"lzf3-d16"`.
pub fn by_name(name: &str) -> Result<SharedProblem> {
    let (family, dim) = name
        .rsplit_once("-d")
        .ok_or_else(|| Error::UnknownProblem(name.to_string()))?;
    let dim: usize = dim
        .parse()
        .map_err(|_| Error::UnknownProblem(name.to_string()))?;
    Ok(Arc::new(benchmark(family, dim)?))
}

/// Every built-in family name.
pub const FAMILIES: [&str; 11] = [
    "zdt1", "zdt2", "zdt3", "zdt4", "zdt6", "lzf1", "lzf2", "lzf3", "lzf4", "lzf5", "lzf6",
];

/// Wraps a problem with a per-evaluation cost. With `sleep` set the
/// evaluation really blocks for `delay`; otherwise the cost only feeds the
/// executor's simulated clock.
pub struct ExpensiveProblem {
    inner: SharedProblem,
    delay: Duration,
    sleep: bool,
    label: String,
}

impl ExpensiveProblem {
    pub fn new(inner: SharedProblem, delay: Duration) -> Self {
        let label = inner.name();
        Self {
            inner,
            delay,
            sleep: false,
            label,
        }
    }

    pub fn sleeping(mut self, sleep: bool) -> Self {
        self.sleep = sleep;
        self
    }

    pub fn named(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// A 15-variable, 2-objective stand-in with a 10 s evaluation cost.
    pub fn costly_synthetic() -> Self {
        let inner: SharedProblem = Arc::new(Benchmark::Zdt(Zdt::Zdt1, 15));
        Self::new(inner, Duration::from_secs(10)).named("synthetic-2obj-d15")
    }
}

impl Problem for ExpensiveProblem {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn n_objectives(&self) -> usize {
        self.inner.n_objectives()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalFailure> {
        if self.sleep && !self.delay.is_zero() {
            thread::sleep(self.delay);
        }
        self.inner.evaluate(x)
    }

    fn pareto_front(&self, n: usize) -> Option<Vec<ObjectiveVector>> {
        self.inner.pareto_front(n)
    }

    fn reporting_ref(&self) -> ReferenceVector {
        self.inner.reporting_ref()
    }

    fn cost(&self) -> Duration {
        self.delay
    }
}
