//! Seeded, sharded Monte Carlo estimation of Bernoulli rates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Trials per shard. Each shard owns an independent ChaCha stream.
pub const SHARD_SIZE: u64 = 4096;

/// Random stream for shard `shard` of a run seeded with `seed`.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Standard error of the rate using the supplied reference probability.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Whether the empirical rate lies within `k` standard errors of `p`.
    /// With `p ∈ {0, 1}` this demands an exact match.
    pub fn agrees_with(&self, p: f64, k: f64) -> bool {
        (self.rate() - p).abs() <= k * self.sigma_at(p) + 1e-12
    }

    /// Wilson score interval at 99% confidence.
    pub fn wilson_99(&self) -> (f64, f64) {
        wilson_interval(self.successes, self.trials, Z_99)
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Runs `trials` Bernoulli trials split into shards of [`SHARD_SIZE`].
/// The count is independent of scheduling.
pub fn estimate<F>(trials: u64, seed: u64, trial: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    assert!(trials >= 1, "at least one trial");
    let shards = trials.div_ceil(SHARD_SIZE);
    let successes = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = shard_rng(seed, s);
            let n = SHARD_SIZE.min(trials - s * SHARD_SIZE);
            (0..n).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum();
    Estimate {
        successes,
        trials,
        seed,
    }
}

/// Sharded accumulation of vector-valued samples; shard results are
/// combined in shard order so floating sums are reproducible.
pub fn accumulate<A, F, G>(samples: u64, seed: u64, init: A, sample: F, merge: G) -> A
where
    A: Clone + Send + Sync,
    F: Fn(&mut ChaCha8Rng, &mut A) + Sync,
    G: Fn(&mut A, &A),
{
    let shards = samples.div_ceil(SHARD_SIZE);
    let parts: Vec<A> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = shard_rng(seed, s);
            let mut acc = init.clone();
            let n = SHARD_SIZE.min(samples - s * SHARD_SIZE);
            for _ in 0..n {
                sample(&mut rng, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = init;
    for p in &parts {
        merge(&mut total, p);
    }
    total
}
