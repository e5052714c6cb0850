//! Deterministic trajectory seeding and order-independent parallel reduction.
//!
//! Trajectory `i` of a run with master seed `m` always consumes the RNG stream
//! seeded by `trajectory_seed(m, i)`, so an ensemble can be produced by any
//! number of workers (or re-produced one trajectory at a time) with identical
//! results. Reductions run over fixed-size chunks of the trajectory index
//! range and merge the partial accumulators in a fixed pairwise tree, which
//! makes the floating-point result independent of the worker count.

use rayon::prelude::*;

/// Trajectories per reduction chunk. Fixed so that the merge tree shape
/// depends only on the trajectory count, never on the thread pool.
pub const CHUNK: u64 = 32;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based per-trajectory seed derived from the master seed.
pub fn trajectory_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index.wrapping_add(1)))
}

/// Partial results that can be combined associatively.
pub trait Merge {
    fn merge(self, other: Self) -> Self;
}

/// Runs `step` for every trajectory index in `0..n`, reducing into
/// accumulators created by `init`.
///
/// Chunks of [`CHUNK`] consecutive indices are processed independently (in
/// parallel when a rayon pool is available) and merged pairwise in index
/// order. Results are bit-identical for any worker count.
pub fn chunked_map_reduce<A, I, S>(n: u64, init: I, step: S) -> A
where
    A: Merge + Send,
    I: Fn() -> A + Sync + Send,
    S: Fn(&mut A, u64) + Sync + Send,
{
    if n == 0 {
        return init();
    }
    let n_chunks = n.div_ceil(CHUNK);
    let mut partials: Vec<A> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            for i in lo..hi {
                step(&mut acc, i);
            }
            acc
        })
        .collect();
    // Fixed-shape binary merge tree over chunk order.
    while partials.len() > 1 {
        let mut next = Vec::with_capacity(partials.len().div_ceil(2));
        let mut it = partials.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.merge(b)),
                None => next.push(a),
            }
        }
        partials = next;
    }
    partials.into_iter().next().unwrap()
}

/// Running mean/variance with Welford updates and exact pairwise merging.
#[derive(Debug, Clone, Default)]
pub struct RunningScalar {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningScalar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean.
    pub fn std_err(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.std_dev() / (self.n as f64).sqrt()
        }
    }
}

impl Merge for RunningScalar {
    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2
            + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Self { n, mean, m2 }
    }
}

/// Per-point running mean/variance over a fixed-length series.
#[derive(Debug, Clone)]
pub struct RunningSeries {
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl RunningSeries {
    pub fn new(len: usize) -> Self {
        Self {
            n: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn push(&mut self, values: impl Iterator<Item = f64>) {
        self.n += 1;
        let inv_n = 1.0 / self.n as f64;
        let mut k = 0;
        for x in values {
            let delta = x - self.mean[k];
            self.mean[k] += delta * inv_n;
            self.m2[k] += delta * (x - self.mean[k]);
            k += 1;
        }
        assert_eq!(k, self.mean.len(), "series length mismatch");
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn variance_at(&self, k: usize) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2[k] / (self.n - 1) as f64
        }
    }

    pub fn std_err_at(&self, k: usize) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance_at(k) / self.n as f64).sqrt()
        }
    }
}

impl Merge for RunningSeries {
    fn merge(self, other: Self) -> Self {
        assert_eq!(self.mean.len(), other.mean.len());
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let (na, nb) = (self.n as f64, other.n as f64);
        let mut mean = self.mean;
        let mut m2 = self.m2;
        for k in 0..mean.len() {
            let delta = other.mean[k] - mean[k];
            mean[k] += delta * nb / n as f64;
            m2[k] += other.m2[k] + delta * delta * na * nb / n as f64;
        }
        Self { n, mean, m2 }
    }
}
