//! Symbol-by-symbol sampling of the channel and receivers.
//!
//! Each trial draws a bit, a channel phase and a detector outcome, and
//! applies the receiver's decision rule. The estimate is independent of
//! every analytic formula in the crate and serves as their oracle.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`). Trials are split into
//! shards of [`SHARD_TRIALS`]; shard `s` is seeded with
//! `ChaCha8Rng::seed_from_u64(seed + s)` (wrapping). Shards run in parallel
//! and only their error counts are merged, so the estimate is bit-exact for
//! a given seed regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::constellation::BinaryConstellation;
use crate::error::{invalid, Result};
use crate::phasenoise::PhaseNoise;
use crate::receivers::{Orientation, ReceiverConfig};

pub const SHARD_TRIALS: u64 = 1 << 20;

/// Largest mean sampled by sequential-search inversion in one piece.
const INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Displace, count photons, compare the count with `config.threshold_k`.
    GeneralizedKennedy {
        config: ReceiverConfig,
        orientation: Orientation,
    },
    /// Measure the in-phase quadrature and decide bit 1 when `x > 0`.
    Homodyne,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub trials: u64,
    pub seed: u64,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    /// Binomial standard error `√(p̂(1−p̂)/trials)`.
    pub std_error: f64,
    pub errors: u64,
    pub trials: u64,
}

impl Estimate {
    /// `(analytic − estimate)/std_error`. Falls back to the analytic
    /// binomial error when no errors (or only errors) were observed.
    pub fn z_score(&self, analytic: f64) -> f64 {
        let se = if self.std_error > 0.0 {
            self.std_error
        } else {
            (analytic * (1.0 - analytic) / self.trials as f64).sqrt()
        };
        if se == 0.0 {
            return if analytic == self.estimate {
                0.0
            } else {
                f64::INFINITY
            };
        }
        (analytic - self.estimate) / se
    }
}

/// Poisson variate by sequential-search inversion. Means above
/// `INVERSION_LIMIT` are split into equal parts whose samples are summed.
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean >= INVERSION_LIMIT {
        let parts = (mean / INVERSION_LIMIT).floor() as u64 + 1;
        let piece = mean / parts as f64;
        return (0..parts).map(|_| sample_poisson(rng, piece)).sum();
    }
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        if p == 0.0 {
            break;
        }
        cdf += p;
    }
    k
}

fn run_shard(
    c: &BinaryConstellation,
    noise: &PhaseNoise,
    scheme: &Scheme,
    seed: u64,
    trials: u64,
) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = noise.sigma();
    let mut errors = 0;
    for _ in 0..trials {
        let bit: u8 = if rng.random::<bool>() { 1 } else { 0 };
        let z: f64 = rng.sample(StandardNormal);
        let alpha = if bit == 1 { c.alpha1 } else { c.alpha0 };
        let received = alpha.rotate(sigma * z);
        let decided = match scheme {
            Scheme::GeneralizedKennedy {
                config,
                orientation,
            } => {
                let mean = (received + config.beta).norm_sqr();
                let count = sample_poisson(&mut rng, mean);
                orientation.decide(count, config.threshold_k)
            }
            Scheme::Homodyne => {
                let noise: f64 = rng.sample(StandardNormal);
                let x = std::f64::consts::SQRT_2 * received.re + noise * 0.5f64.sqrt();
                u8::from(x > 0.0)
            }
        };
        if decided != bit {
            errors += 1;
        }
    }
    errors
}

/// Estimates the error probability of `t.scheme` on constellation `c` by
/// direct simulation.
pub fn simulate_perr(
    c: &BinaryConstellation,
    noise: &PhaseNoise,
    t: &TrialConfig,
) -> Result<Estimate> {
    if t.trials == 0 {
        return Err(invalid("trial count must be at least 1"));
    }
    if let Scheme::GeneralizedKennedy { config, .. } = &t.scheme {
        config.validate()?;
    }
    let shards = t.trials.div_ceil(SHARD_TRIALS);
    let errors: u64 = (0..shards)
        .into_par_iter()
        .map(|s| {
            let len = SHARD_TRIALS.min(t.trials - s * SHARD_TRIALS);
            run_shard(c, noise, &t.scheme, t.seed.wrapping_add(s), len)
        })
        .sum();
    let p = errors as f64 / t.trials as f64;
    Ok(Estimate {
        estimate: p,
        std_error: (p * (1.0 - p) / t.trials as f64).sqrt(),
        errors,
        trials: t.trials,
    })
}

pub fn kennedy_trials(
    config: ReceiverConfig,
    orientation: Orientation,
    trials: u64,
    seed: u64,
) -> TrialConfig {
    TrialConfig {
        trials,
        seed,
        scheme: Scheme::GeneralizedKennedy {
            config,
            orientation,
        },
    }
}
