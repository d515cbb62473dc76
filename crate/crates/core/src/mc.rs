//! Chunked, counter-based Monte Carlo.
//!
//! Samples are grouped into fixed-size chunks; chunk `c` draws from a ChaCha8 stream
//! keyed by `(seed, c)`. Chunk moments are merged in chunk order, so results do not
//! depend on the rayon thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const CHUNK: u64 = 2048;

/// Mean of an estimator with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn scaled(self, c: f64) -> Self {
        McEstimate { mean: self.mean * c, stderr: self.stderr * c.abs(), ..self }
    }
}

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// First and second moments of an `N`-vector estimator.
#[derive(Clone, Debug)]
pub struct Moments<const N: usize> {
    pub n: u64,
    pub sum: [f64; N],
    pub cross: [[f64; N]; N],
}

impl<const N: usize> Default for Moments<N> {
    fn default() -> Self {
        Moments { n: 0, sum: [0.0; N], cross: [[0.0; N]; N] }
    }
}

impl<const N: usize> Moments<N> {
    pub fn push(&mut self, v: [f64; N]) {
        self.n += 1;
        for i in 0..N {
            self.sum[i] += v[i];
            for j in 0..N {
                self.cross[i][j] += v[i] * v[j];
            }
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.n += other.n;
        for i in 0..N {
            self.sum[i] += other.sum[i];
            for j in 0..N {
                self.cross[i][j] += other.cross[i][j];
            }
        }
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.sum[i] / self.n as f64
    }

    pub fn cov(&self, i: usize, j: usize) -> f64 {
        let n = self.n as f64;
        if self.n < 2 {
            return f64::INFINITY;
        }
        ((self.cross[i][j] - self.sum[i] * self.sum[j] / n) / (n - 1.0)).max(if i == j { 0.0 } else { f64::MIN })
    }

    pub fn estimate(&self, i: usize, seed: u64) -> McEstimate {
        McEstimate { mean: self.mean(i), stderr: (self.cov(i, i) / self.n as f64).sqrt(), n: self.n, seed }
    }

    /// Delta-method estimate of `mean(i) / mean(j)`.
    pub fn ratio(&self, i: usize, j: usize, seed: u64) -> McEstimate {
        let (a, b) = (self.mean(i), self.mean(j));
        let r = a / b;
        let var = (self.cov(i, i) - 2.0 * r * self.cov(i, j) + r * r * self.cov(j, j)) / (b * b);
        McEstimate { mean: r, stderr: (var.max(0.0) / self.n as f64).sqrt(), n: self.n, seed }
    }
}

/// Run `n` draws of `sample` in parallel chunks and merge their moments in order.
pub fn run<const N: usize, F>(n: u64, seed: u64, sample: F) -> Moments<N>
where
    F: Fn(&mut ChaCha8Rng) -> [f64; N] + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Moments<N>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let count = CHUNK.min(n - c * CHUNK);
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(sample(&mut rng));
            }
            m
        })
        .collect();
    let mut total = Moments::default();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Derive an independent seed for sub-experiment `index`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform point on `S^{d-1}`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
