//! One-dimensional rules, tensor grids and a seeded Monte Carlo estimator.

use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Nodes and weights of a one-dimensional rule.
#[derive(Clone, Debug, Default)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    fn append(&mut self, other: Rule1D) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }
}

fn nz(n: usize) -> NonZeroUsize {
    NonZeroUsize::new(n.max(1)).expect("positive")
}

/// Gauss–Legendre rule of the given order on [lo, hi].
pub fn gauss_legendre(order: usize, lo: f64, hi: f64) -> Rule1D {
    let rule = GaussLegendre::new(nz(order));
    let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule1D {
        nodes: pairs.iter().map(|(x, _)| mid + half * x).collect(),
        weights: pairs.iter().map(|(_, w)| half * w).collect(),
    }
}

/// Composite Gauss–Legendre on `panels` equal subintervals.
pub fn composite(order: usize, panels: usize, lo: f64, hi: f64) -> Rule1D {
    let h = (hi - lo) / panels as f64;
    let mut out = Rule1D::default();
    for p in 0..panels {
        out.append(gauss_legendre(order, lo + h * p as f64, lo + h * (p + 1) as f64));
    }
    out
}

/// Composite Gauss–Legendre with panels shrinking geometrically (ratio 1/2) toward `lo`.
pub fn graded(order: usize, levels: usize, lo: f64, hi: f64) -> Rule1D {
    let mut out = Rule1D::default();
    let mut right = hi;
    for _ in 0..levels {
        let left = lo + (right - lo) / 2.0;
        out.append(gauss_legendre(order, left, right));
        right = left;
    }
    out.append(gauss_legendre(order, lo, right));
    out
}

/// Trapezoid rule for a periodic integrand on [lo, hi).
pub fn periodic(n: usize, lo: f64, hi: f64) -> Rule1D {
    let h = (hi - lo) / n as f64;
    Rule1D { nodes: (0..n).map(|i| lo + h * (i as f64 + 0.5)).collect(), weights: vec![h; n] }
}

/// Gauss–Hermite rule for the weight e^{−x²}.
pub fn gauss_hermite(order: usize) -> Rule1D {
    let rule = GaussHermite::new(nz(order));
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule1D { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// All points of the tensor-product grid, with product weights.
pub fn tensor(rules: &[Rule1D]) -> Vec<(Vec<f64>, f64)> {
    let mut out = vec![(Vec::with_capacity(rules.len()), 1.0)];
    for r in rules {
        let mut next = Vec::with_capacity(out.len() * r.len());
        for (x, w) in &out {
            for (&n, &v) in r.nodes.iter().zip(&r.weights) {
                let mut y = x.clone();
                y.push(n);
                next.push((y, w * v));
            }
        }
        out = next;
    }
    out
}

/// A value with an estimate of its absolute error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    /// The finer value, with the difference to the coarser one as error.
    pub fn from_pair(fine: Complex64, coarse: Complex64) -> Self {
        Self { value: fine, error: (fine - coarse).norm() }
    }

    pub fn exact(value: Complex64) -> Self {
        Self { value, error: 0.0 }
    }
}

/// Σ w·f(x) over a point list, summed in fixed chunks so results do not depend on thread count.
pub fn weighted_sum<T: Sync>(points: &[T], f: impl Fn(&T) -> Complex64 + Sync) -> Complex64 {
    const CHUNK: usize = 1024;
    let partial: Vec<Complex64> = points.par_chunks(CHUNK).map(|c| c.iter().map(&f).sum()).collect();
    partial.into_iter().sum()
}

/// Monte Carlo mean with standard error. Each chunk of samples draws from its own
/// ChaCha stream, so the estimate is reproducible under any thread schedule.
pub fn monte_carlo<F>(seed: u64, samples: usize, f: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> Complex64 + Sync,
{
    monte_carlo_vec(seed, samples, 1, |rng, out| out[0] = f(rng)).remove(0)
}

/// Monte Carlo estimates of `width` integrands sharing each sample.
pub fn monte_carlo_vec<F>(seed: u64, samples: usize, width: usize, f: F) -> Vec<Estimate>
where
    F: Fn(&mut ChaCha8Rng, &mut [Complex64]) + Sync,
{
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let zero = Complex64::new(0.0, 0.0);
    let partial: Vec<(Vec<Complex64>, Vec<f64>, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut sum = vec![zero; width];
            let mut sq = vec![0.0; width];
            let mut out = vec![zero; width];
            for _ in 0..n {
                f(&mut rng, &mut out);
                for k in 0..width {
                    sum[k] += out[k];
                    sq[k] += out[k].norm_sqr();
                }
            }
            (sum, sq, n)
        })
        .collect();
    let mut sum = vec![zero; width];
    let mut sq = vec![0.0; width];
    let mut n = 0usize;
    for (s, q, m) in partial {
        for k in 0..width {
            sum[k] += s[k];
            sq[k] += q[k];
        }
        n += m;
    }
    (0..width)
        .map(|k| {
            let mean = sum[k] / n as f64;
            let var = (sq[k] / n as f64 - mean.norm_sqr()).max(0.0) * n as f64 / (n.max(2) - 1) as f64;
            Estimate { value: mean, error: (var / n as f64).sqrt() }
        })
        .collect()
}
