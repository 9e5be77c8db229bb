//! Error probabilities of the structured receivers.
//!
//! * direct detection of on-off keying,
//! * shot-noise-limited homodyne readout of BPSK,
//! * the generalized Kennedy receiver: displacement by `β`, photon counting,
//!   and a count threshold `K`,
//! * the noiseless Helstrom bound for a pair of pure coherent states.
//!
//! Phase noise acts on the signal amplitudes only; the displacement is
//! phase-locked to the channel.

use std::f64::consts::PI;

use crate::constellation::{make_bpsk, BinaryConstellation, ComplexAmplitude};
use crate::error::{invalid, Error, Result};
use crate::phasenoise::PhaseNoise;
use crate::special::{erfc, poisson_pmf, poisson_tails};

/// Displacement, count threshold and photon-number-resolution ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverConfig {
    pub beta: ComplexAmplitude,
    pub threshold_k: u32,
    /// Number of photons the detector resolves; thresholds must stay below it.
    pub pnr_ceiling: u32,
}

impl ReceiverConfig {
    pub fn new(beta: ComplexAmplitude, threshold_k: u32, pnr_ceiling: u32) -> Result<Self> {
        let cfg = Self {
            beta,
            threshold_k,
            pnr_ceiling,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() {
            return Err(invalid("displacement must be finite"));
        }
        if self.threshold_k >= self.pnr_ceiling {
            return Err(Error::Constraint {
                threshold: self.threshold_k,
                ceiling: self.pnr_ceiling,
            });
        }
        Ok(())
    }
}

/// Which symbol the threshold rule assigns to "more than K counts".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `k > K` decides bit 1 (`α₁`), `k ≤ K` decides bit 0.
    Standard,
    /// `k > K` decides bit 0 (`α₀`), `k ≤ K` decides bit 1.
    Swapped,
}

impl Orientation {
    /// Bit decided for `count` photocounts at threshold `threshold_k`.
    pub fn decide(self, count: u64, threshold_k: u32) -> u8 {
        let above = count > u64::from(threshold_k);
        match (self, above) {
            (Orientation::Standard, true) | (Orientation::Swapped, false) => 1,
            _ => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Standard => "standard",
            Orientation::Swapped => "swapped",
        }
    }
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error probability of a threshold rule together with the orientation that
/// achieved it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOutcome {
    pub threshold_k: u32,
    pub perr: f64,
    pub orientation: Orientation,
    /// Error probability of the standard orientation, whichever was chosen.
    pub perr_standard: f64,
}

/// OOK with direct detection: `½·e^{−2n̄}`. Immune to phase noise.
pub fn perr_ook_dd(nbar: f64) -> f64 {
    0.5 * (-2.0 * nbar).exp()
}

/// Homodyne outcome density for the in-phase quadrature, shot-noise
/// variance ½.
pub fn homodyne_pdf(x: f64, alpha: ComplexAmplitude) -> f64 {
    let d = x - std::f64::consts::SQRT_2 * alpha.re;
    (-d * d).exp() / PI.sqrt()
}

/// BPSK `(−√n̄, √n̄)` read out by homodyne detection with the decision
/// threshold at `x = 0`.
///
/// The Gaussian outcome integral is done in closed form, leaving
/// `⟨½·erfc(√(2n̄)·cos φ)⟩_φ`.
pub fn perr_bpsk_hom(nbar: f64, noise: &PhaseNoise) -> Result<f64> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(invalid(format!(
            "mean photon number must be non-negative, got {nbar}"
        )));
    }
    let amplitude = (2.0 * nbar).sqrt();
    noise.average(|phi| 0.5 * erfc(amplitude * phi.cos()))
}

/// Photocount mean `|α·e^{iφ} + β|²`.
fn displaced_intensity(alpha: ComplexAmplitude, beta: ComplexAmplitude, phi: f64) -> f64 {
    (alpha.rotate(phi) + beta).norm_sqr()
}

/// Probability of `k` counts for symbol `alpha` displaced by `beta` after
/// the phase-noise channel.
pub fn photocount_probability(
    k: usize,
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    noise: &PhaseNoise,
) -> Result<f64> {
    noise.average(|phi| poisson_pmf(k, displaced_intensity(alpha, beta, phi)))
}

/// Photocount probabilities `p₀ … p_N` and the mass beyond `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotocountDistribution {
    pub probs: Vec<f64>,
    pub truncation: usize,
    pub tail_mass: f64,
}

impl PhotocountDistribution {
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }
}

/// Truncation bound for photon numbers with mean up to `max_mean`; the
/// Poisson mass beyond it is below 1e-12 for the means used here.
pub fn truncation_bound(max_mean: f64) -> usize {
    (max_mean + 10.0 * (max_mean + 1.0).sqrt() + 20.0).ceil() as usize
}

/// Full photocount distribution, truncated at [`truncation_bound`] of the
/// largest possible count mean `(|α| + |β|)²`.
pub fn photocount_distribution(
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    noise: &PhaseNoise,
) -> Result<PhotocountDistribution> {
    let max_mean = (alpha.abs() + beta.abs()).powi(2);
    let truncation = truncation_bound(max_mean);
    let probs = noise.average_many(truncation + 1, |phi, out| {
        let mean = displaced_intensity(alpha, beta, phi);
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = poisson_pmf(k, mean);
        }
    })?;
    let total: f64 = probs.iter().sum();
    Ok(PhotocountDistribution {
        probs,
        truncation,
        tail_mass: (1.0 - total).max(0.0),
    })
}

/// Threshold-rule outcomes for every `K` in `thresholds` at displacement
/// `beta`, evaluated with a single phase average.
///
/// For each symbol the lower tail `P[k ≤ K]` and its complement are
/// averaged separately, so both orientations keep full relative accuracy.
pub fn threshold_outcomes(
    c: &BinaryConstellation,
    beta: ComplexAmplitude,
    noise: &PhaseNoise,
    thresholds: std::ops::RangeInclusive<u32>,
) -> Result<Vec<ThresholdOutcome>> {
    let first = *thresholds.start() as usize;
    let last = *thresholds.end() as usize;
    if last < first {
        return Ok(Vec::new());
    }
    let count = last - first + 1;
    let (alpha0, alpha1) = (c.alpha0, c.alpha1);
    // Layout per threshold: [lower0, upper0, lower1, upper1].
    let tails = noise.average_many(4 * count, |phi, out| {
        for (symbol, alpha) in [alpha0, alpha1].into_iter().enumerate() {
            let mean = displaced_intensity(alpha, beta, phi);
            for k in first..=last {
                let (lower, upper) = poisson_tails(k, mean);
                let slot = 4 * (k - first) + 2 * symbol;
                out[slot] = lower;
                out[slot + 1] = upper;
            }
        }
    })?;
    Ok(tails
        .chunks_exact(4)
        .zip(thresholds)
        .map(|(t, threshold_k)| {
            let standard = 0.5 * (t[2] + t[1]);
            let swapped = 0.5 * (t[0] + t[3]);
            let (perr, orientation) = if swapped < standard {
                (swapped, Orientation::Swapped)
            } else {
                (standard, Orientation::Standard)
            };
            ThresholdOutcome {
                threshold_k,
                perr: perr.clamp(0.0, 1.0),
                orientation,
                perr_standard: standard.clamp(0.0, 1.0),
            }
        })
        .collect())
}

/// Generalized Kennedy receiver: error probability of the better of the two
/// threshold-rule orientations, and which one it was.
pub fn generalized_kennedy(
    c: &BinaryConstellation,
    cfg: &ReceiverConfig,
    noise: &PhaseNoise,
) -> Result<ThresholdOutcome> {
    cfg.validate()?;
    let k = cfg.threshold_k;
    let outcomes = threshold_outcomes(c, cfg.beta, noise, k..=k)?;
    Ok(outcomes[0])
}

pub fn perr_generalized_kennedy(
    c: &BinaryConstellation,
    cfg: &ReceiverConfig,
    noise: &PhaseNoise,
) -> Result<f64> {
    generalized_kennedy(c, cfg, noise).map(|o| o.perr)
}

/// Kennedy receiver for BPSK: null `α₀` and detect on/off.
pub fn perr_kennedy(nbar: f64, noise: &PhaseNoise) -> Result<f64> {
    let bpsk = make_bpsk(nbar)?;
    let cfg = ReceiverConfig::new(-bpsk.alpha0, 0, 1)?;
    perr_generalized_kennedy(&bpsk, &cfg, noise)
}

/// Which conventional scheme sets the standard quantum limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqlBranch {
    OokDirectDetection,
    BpskHomodyne,
}

impl SqlBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            SqlBranch::OokDirectDetection => "ook/dd",
            SqlBranch::BpskHomodyne => "bpsk/hom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqlBaseline {
    pub ook_dd: f64,
    pub bpsk_hom: f64,
    pub sql: f64,
    pub branch: SqlBranch,
}

pub fn sql_baseline(nbar: f64, noise: &PhaseNoise) -> Result<SqlBaseline> {
    let ook_dd = perr_ook_dd(nbar);
    let bpsk_hom = perr_bpsk_hom(nbar, noise)?;
    let (sql, branch) = if bpsk_hom < ook_dd {
        (bpsk_hom, SqlBranch::BpskHomodyne)
    } else {
        (ook_dd, SqlBranch::OokDirectDetection)
    };
    Ok(SqlBaseline {
        ook_dd,
        bpsk_hom,
        sql,
        branch,
    })
}

/// Conventional-detection limit: the better of OOK/DD and BPSK/homodyne.
pub fn perr_sql_baseline(nbar: f64, noise: &PhaseNoise) -> Result<f64> {
    sql_baseline(nbar, noise).map(|b| b.sql)
}

/// Helstrom bound for two pure coherent states,
/// `[1 − √(1 − e^{−|α₁−α₀|²})]/2`.
pub fn perr_helstrom_noiseless(c: &BinaryConstellation) -> f64 {
    let overlap = (-c.separation_sqr()).exp();
    // 1 − √(1−x) rewritten as x/(1 + √(1−x)) to keep precision for small x.
    0.5 * overlap / (1.0 + (1.0 - overlap).sqrt())
}
