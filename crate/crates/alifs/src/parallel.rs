//! Sharded parallel execution on a private rayon pool.
//!
//! Work is cut into a fixed number of shards. Shard `i` of stage `label`
//! draws from `RandomStream::new(derive_seed(seed, label), i)` and results
//! come back in shard order, so the thread count never changes an output.

use alifs_core::model::ModelSpec;
use alifs_core::sim::{self, ChainRun, RunDiagnostics, SimConfig};
use alifs_core::RandomStream;
use rayon::prelude::*;

/// Stage labels used to derive per-stage seeds.
pub mod stage {
    /// Stationary sampling.
    pub const STATIONARY: u64 = 1;
    /// Pairing samples with fresh draws for tail constants.
    pub const CONSTANTS: u64 = 2;
    /// Martingale check.
    pub const MARTINGALE: u64 = 3;
    /// Gelfand check.
    pub const GELFAND: u64 = 4;
    /// Comparison-bound check.
    pub const BOUND: u64 = 5;
    /// Shape frequencies and AL bound.
    pub const SHAPES: u64 = 6;
}

/// Thread pool plus the stream layout of a run.
pub struct Executor {
    pool: rayon::ThreadPool,
    seed: u64,
    shards: usize,
}

impl Executor {
    /// Pool with `threads` workers (all cores for `None`).
    pub fn new(threads: Option<usize>, seed: u64, shards: usize) -> anyhow::Result<Self> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            b = b.num_threads(t);
        }
        Ok(Self {
            pool: b.build()?,
            seed,
            shards: shards.max(1),
        })
    }

    /// Number of shards.
    pub fn shards(&self) -> usize {
        self.shards
    }

    /// Stream of one shard of one stage.
    pub fn stream(&self, label: u64, shard: usize) -> RandomStream {
        RandomStream::new(RandomStream::derive_seed(self.seed, label), shard as u64)
    }

    /// Runs `f(shard, stream)` for every shard; results in shard order.
    pub fn map_shards<T, F>(&self, label: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &mut RandomStream) -> T + Sync,
    {
        self.pool.install(|| {
            (0..self.shards)
                .into_par_iter()
                .map(|i| f(i, &mut self.stream(label, i)))
                .collect()
        })
    }

    /// Splits `n` items over the shards and runs `f(count, stream)` on each.
    pub fn map_counts<T, F>(&self, label: u64, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &mut RandomStream) -> T + Sync,
    {
        let sizes = sim::shard_sizes(n, self.shards);
        self.map_shards(label, |i, rng| f(sizes[i], rng))
    }

    /// Stationary samples: one certified chain per shard, concatenated.
    pub fn sample_stationary(&self, spec: &ModelSpec, n: usize, cfg: &SimConfig) -> ShardedRun {
        let runs = self.map_counts(stage::STATIONARY, n, |k, rng| {
            sim::sample_stationary(spec, k, cfg, rng)
        });
        ShardedRun::from_runs(runs)
    }
}

/// Concatenated output of all shards.
#[derive(Debug, Clone, PartialEq)]
pub struct ShardedRun {
    /// Samples in shard order.
    pub samples: Vec<f64>,
    /// Diagnostics per shard.
    pub shards: Vec<RunDiagnostics>,
}

impl ShardedRun {
    fn from_runs(runs: Vec<ChainRun>) -> Self {
        let mut samples = Vec::with_capacity(runs.iter().map(|r| r.samples.len()).sum());
        let mut shards = Vec::with_capacity(runs.len());
        for r in runs {
            samples.extend_from_slice(&r.samples);
            shards.push(r.diagnostics);
        }
        Self { samples, shards }
    }

    /// Every shard's coupling succeeded.
    pub fn certified(&self) -> bool {
        self.shards.iter().all(|d| d.certified)
    }
}
