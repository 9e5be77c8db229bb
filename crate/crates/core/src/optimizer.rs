//! Joint optimization of constellation, displacement and count threshold.
//!
//! The power budget is enforced by construction: a single angle `θ` places
//! both amplitudes on the circle `α₀² + α₁² = 2n̄` (see [`parametrize`]),
//! so every candidate is feasible. Both amplitudes and the displacement
//! live on the real axis; the phase distribution is even, so the error
//! probability is invariant under joint conjugation and nothing is lost.
//!
//! The search runs in two stages:
//!
//! 1. an exhaustive grid over `θ ∈ [0, π)` and `β ∈ [−3√(2n̄), 3√(2n̄)]`,
//!    evaluating every threshold `K < pnr_ceiling` at each point;
//! 2. golden-section coordinate descent on `(θ, β)` from the best grid
//!    points of every `K`.
//!
//! Everything is deterministic. Grid rows and refinements run in parallel,
//! but results are reduced in grid order, so serial and parallel runs agree
//! bit for bit.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::constellation::{BinaryConstellation, ComplexAmplitude};
use crate::error::{invalid, Error, Result};
use crate::helstrom::perr_helstrom;
use crate::phasenoise::PhaseNoise;
use crate::receivers::{
    generalized_kennedy, perr_sql_baseline, threshold_outcomes, Orientation, ReceiverConfig,
    ThresholdOutcome,
};

pub const DEFAULT_THETA_POINTS: usize = 181;
pub const DEFAULT_BETA_POINTS: usize = 241;
pub const DEFAULT_SEEDS_PER_THRESHOLD: usize = 5;
pub const DEFAULT_REFINE_TOLERANCE: f64 = 1e-8;
/// Candidates closer than this in error probability count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

const MAX_CYCLES: usize = 60;

/// Two real amplitudes on the power circle:
/// `α₀ = √(2n̄)·cos θ`, `α₁ = √(2n̄)·sin θ`.
///
/// `θ = π/2` is OOK and `θ = 3π/4` is BPSK.
pub fn parametrize(theta: f64, nbar: f64) -> BinaryConstellation {
    let radius = (2.0 * nbar).sqrt();
    let (s, c) = theta.sin_cos();
    BinaryConstellation {
        alpha0: ComplexAmplitude::real(radius * c),
        alpha1: ComplexAmplitude::real(radius * s),
    }
}

/// Half-width of the displacement grid, `3√(2n̄)`.
pub fn beta_max(nbar: f64) -> f64 {
    3.0 * (2.0 * nbar).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationProblem {
    pub nbar: f64,
    pub noise: PhaseNoise,
    pub pnr_ceiling: u32,
    /// Number of `θ` grid points over `[0, π)`.
    pub grid_resolution: usize,
    /// Number of `β` grid points over `[−β_max, β_max]`.
    pub beta_resolution: usize,
    /// Parameter tolerance of the golden-section refinement.
    pub refine_tolerance: f64,
    pub seeds_per_threshold: usize,
}

impl OptimizationProblem {
    pub fn new(nbar: f64, noise: PhaseNoise, pnr_ceiling: u32) -> Result<Self> {
        let p = Self {
            nbar,
            noise,
            pnr_ceiling,
            grid_resolution: DEFAULT_THETA_POINTS,
            beta_resolution: DEFAULT_BETA_POINTS,
            refine_tolerance: DEFAULT_REFINE_TOLERANCE,
            seeds_per_threshold: DEFAULT_SEEDS_PER_THRESHOLD,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nbar.is_finite() && self.nbar > 0.0) {
            return Err(invalid(format!(
                "power budget must be positive, got {}",
                self.nbar
            )));
        }
        if self.pnr_ceiling == 0 {
            return Err(invalid("PNR ceiling must be at least 1"));
        }
        if self.grid_resolution < 2 || self.beta_resolution < 2 {
            return Err(invalid("grid resolutions must be at least 2"));
        }
        if !(self.refine_tolerance.is_finite() && self.refine_tolerance > 0.0) {
            return Err(invalid("refinement tolerance must be positive"));
        }
        if self.seeds_per_threshold == 0 {
            return Err(invalid("at least one seed per threshold is required"));
        }
        Ok(())
    }

    fn theta_step(&self) -> f64 {
        PI / self.grid_resolution as f64
    }

    fn beta_step(&self) -> f64 {
        2.0 * beta_max(self.nbar) / (self.beta_resolution - 1) as f64
    }

    fn theta_at(&self, i: usize) -> f64 {
        i as f64 * self.theta_step()
    }

    fn beta_at(&self, j: usize) -> f64 {
        -beta_max(self.nbar) + j as f64 * self.beta_step()
    }

    fn evaluate(&self, theta: f64, beta: f64, threshold_k: u32) -> Result<ThresholdOutcome> {
        let c = parametrize(theta, self.nbar);
        let cfg = ReceiverConfig {
            beta: ComplexAmplitude::real(beta),
            threshold_k,
            pnr_ceiling: self.pnr_ceiling,
        };
        generalized_kennedy(&c, &cfg, &self.noise).map_err(|e| at_point(theta, beta, e))
    }
}

fn at_point(theta: f64, beta: f64, source: Error) -> Error {
    Error::GridPoint {
        theta,
        beta,
        source: Box::new(source),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: usize,
    pub perr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub theta: f64,
    pub constellation: BinaryConstellation,
    pub config: ReceiverConfig,
    pub perr: f64,
    /// Conventional-detection limit at the same power and noise.
    pub perr_sql: f64,
    /// Helstrom limit for the returned constellation.
    pub perr_helstrom: f64,
    pub orientation: Orientation,
    /// Best error probability found on the grid, before refinement.
    pub grid_best: f64,
    /// Iteration 0 is the winning seed; later entries follow its refinement
    /// cycles.
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    perr: f64,
    threshold_k: u32,
    theta: f64,
    beta: f64,
    orientation: Orientation,
}

/// Deterministic preference: lower error, unless within [`TIE_TOLERANCE`],
/// in which case smaller `K` and then smaller `|β|` win.
///
/// Swapping the two amplitudes and flipping the orientation gives exactly
/// the same error, so mirror-image optima tie in everything but roundoff.
/// `|β|` values within `BETA_TIE` are therefore equal, and the standard
/// orientation breaks the remaining tie.
fn better(a: &Candidate, b: &Candidate) -> bool {
    const BETA_TIE: f64 = 1e-6;
    if a.perr < b.perr - TIE_TOLERANCE {
        return true;
    }
    if (a.perr - b.perr).abs() > TIE_TOLERANCE {
        return false;
    }
    if a.threshold_k != b.threshold_k {
        return a.threshold_k < b.threshold_k;
    }
    if (a.beta.abs() - b.beta.abs()).abs() > BETA_TIE {
        return a.beta.abs() < b.beta.abs();
    }
    a.orientation == Orientation::Standard && b.orientation == Orientation::Swapped
}

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping once
/// the bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_section_min<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Stage 1: every grid point, every threshold. Returns per-threshold
/// candidate lists in grid order.
fn scan_grid(p: &OptimizationProblem) -> Result<Vec<Vec<Candidate>>> {
    let kmax = p.pnr_ceiling - 1;
    let rows: Vec<Result<Vec<Candidate>>> = (0..p.grid_resolution)
        .into_par_iter()
        .map(|i| {
            let theta = p.theta_at(i);
            let c = parametrize(theta, p.nbar);
            let mut row = Vec::with_capacity(p.beta_resolution * p.pnr_ceiling as usize);
            for j in 0..p.beta_resolution {
                let beta = p.beta_at(j);
                let outcomes =
                    threshold_outcomes(&c, ComplexAmplitude::real(beta), &p.noise, 0..=kmax)
                        .map_err(|e| at_point(theta, beta, e))?;
                row.extend(outcomes.iter().map(|o| Candidate {
                    perr: o.perr,
                    threshold_k: o.threshold_k,
                    theta,
                    beta,
                    orientation: o.orientation,
                }));
            }
            Ok(row)
        })
        .collect();
    let mut per_k = vec![Vec::new(); p.pnr_ceiling as usize];
    for row in rows {
        for cand in row? {
            per_k[cand.threshold_k as usize].push(cand);
        }
    }
    Ok(per_k)
}

/// Best grid points of one threshold, skipping points within one grid step
/// of a seed already taken.
fn pick_seeds(p: &OptimizationProblem, mut cands: Vec<Candidate>) -> Vec<Candidate> {
    cands.sort_by(|a, b| {
        a.perr
            .total_cmp(&b.perr)
            .then(a.beta.abs().total_cmp(&b.beta.abs()))
            .then(a.theta.total_cmp(&b.theta))
            .then(a.beta.total_cmp(&b.beta))
    });
    let (dt, db) = (p.theta_step() * 1.5, p.beta_step() * 1.5);
    let mut seeds: Vec<Candidate> = Vec::with_capacity(p.seeds_per_threshold);
    for c in cands {
        if seeds.len() == p.seeds_per_threshold {
            break;
        }
        if seeds
            .iter()
            .all(|s| (s.theta - c.theta).abs() > dt || (s.beta - c.beta).abs() > db)
        {
            seeds.push(c);
        }
    }
    seeds
}

struct Refined {
    best: Candidate,
    trace: Vec<TracePoint>,
}

/// Stage 2: coordinate-wise golden-section descent on `(θ, β)` at fixed `K`.
///
/// Each line search brackets the current point by the larger of the grid
/// step and ten times the last move, so the search tightens as it settles.
/// Moves are only accepted when they lower the error.
fn refine(p: &OptimizationProblem, seed: Candidate) -> Result<Refined> {
    let k = seed.threshold_k;
    let tol = p.refine_tolerance;
    let (mut theta, mut beta) = (seed.theta, seed.beta);
    let mut outcome = p.evaluate(theta, beta, k)?;
    let mut trace = vec![TracePoint {
        iteration: 0,
        perr: outcome.perr,
    }];
    let (mut h_theta, mut h_beta) = (p.theta_step(), p.beta_step());
    for cycle in 1..=MAX_CYCLES {
        let before = outcome.perr;

        let (t, ft) = golden_section_min(
            |t| p.evaluate(t, beta, k).map(|o| o.perr),
            theta - h_theta,
            theta + h_theta,
            tol,
        )?;
        let mut moved_theta = 0.0;
        if ft < outcome.perr {
            moved_theta = (t - theta).abs();
            theta = t;
            outcome = p.evaluate(theta, beta, k)?;
        }

        let (b, fb) = golden_section_min(
            |b| p.evaluate(theta, b, k).map(|o| o.perr),
            beta - h_beta,
            beta + h_beta,
            tol,
        )?;
        let mut moved_beta = 0.0;
        if fb < outcome.perr {
            moved_beta = (b - beta).abs();
            beta = b;
            outcome = p.evaluate(theta, beta, k)?;
        }

        trace.push(TracePoint {
            iteration: cycle,
            perr: outcome.perr,
        });
        let stalled = before - outcome.perr <= 1e-14 * outcome.perr;
        if (moved_theta <= tol && moved_beta <= tol) || stalled {
            break;
        }
        h_theta = (10.0 * moved_theta).clamp(10.0 * tol, p.theta_step());
        h_beta = (10.0 * moved_beta).clamp(10.0 * tol, p.beta_step());
    }
    Ok(Refined {
        best: Candidate {
            perr: outcome.perr,
            threshold_k: k,
            theta,
            beta,
            orientation: outcome.orientation,
        },
        trace,
    })
}

/// Minimizes the generalized Kennedy error probability over constellation,
/// displacement and threshold for the given power budget and noise.
pub fn optimize(p: &OptimizationProblem) -> Result<OptimizationResult> {
    p.validate()?;
    let per_k = scan_grid(p)?;
    let grid_best = per_k
        .iter()
        .flatten()
        .fold(None::<Candidate>, |best, c| match best {
            Some(b) if !better(c, &b) => Some(b),
            _ => Some(*c),
        })
        .expect("grid is non-empty");

    let seeds: Vec<Candidate> = per_k
        .into_iter()
        .flat_map(|cands| pick_seeds(p, cands))
        .collect();
    let refined: Vec<Result<Refined>> = seeds.par_iter().map(|s| refine(p, *s)).collect();

    let mut winner: Option<Refined> = None;
    for r in refined {
        let r = r?;
        let replace = match &winner {
            None => true,
            Some(w) => better(&r.best, &w.best),
        };
        if replace {
            winner = Some(r);
        }
    }
    let winner = winner.expect("at least one seed");
    let best = winner.best;
    let constellation = parametrize(best.theta, p.nbar);
    let config = ReceiverConfig {
        beta: ComplexAmplitude::real(best.beta),
        threshold_k: best.threshold_k,
        pnr_ceiling: p.pnr_ceiling,
    };
    Ok(OptimizationResult {
        theta: best.theta,
        constellation,
        config,
        perr: best.perr,
        perr_sql: perr_sql_baseline(p.nbar, &p.noise)?,
        perr_helstrom: perr_helstrom(&constellation, &p.noise)?,
        orientation: best.orientation,
        grid_best: grid_best.perr,
        trace: winner.trace,
    })
}

/// One `(σ, PNR)` cell of a noise sweep. A failed optimization is kept as
/// the error rather than aborting the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub sigma: f64,
    pub pnr_ceiling: u32,
    pub outcome: Result<OptimizationResult>,
}

/// Runs [`optimize`] for every noise strength and PNR ceiling, with the
/// remaining settings taken from `template`. Cells come back ordered by
/// PNR ceiling, then `σ`, both ascending.
pub fn sweep_sigma(
    template: &OptimizationProblem,
    sigmas: &[f64],
    pnr_list: &[u32],
) -> Result<Vec<SweepCell>> {
    if sigmas.is_empty() || pnr_list.is_empty() {
        return Err(invalid(
            "sweep needs at least one sigma and one PNR ceiling",
        ));
    }
    let mut sigmas = sigmas.to_vec();
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();
    let mut pnrs = pnr_list.to_vec();
    pnrs.sort_unstable();
    pnrs.dedup();

    let mut cells = Vec::with_capacity(sigmas.len() * pnrs.len());
    for &pnr in &pnrs {
        for &sigma in &sigmas {
            cells.push((sigma, pnr));
        }
    }
    Ok(cells
        .par_iter()
        .map(|&(sigma, pnr)| {
            let outcome = PhaseNoise::new(sigma)
                .and_then(|n| n.with_settings(*template.noise.settings()))
                .and_then(|noise| {
                    optimize(&OptimizationProblem {
                        noise,
                        pnr_ceiling: pnr,
                        ..*template
                    })
                });
            SweepCell {
                sigma,
                pnr_ceiling: pnr,
                outcome,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelstromOptimum {
    pub theta: f64,
    pub constellation: BinaryConstellation,
    pub perr: f64,
}

/// Constellation on the power circle with the lowest Helstrom limit under
/// `noise`: a `θ` grid of `resolution` points over `[0, π)` followed by a
/// golden-section polish around the best point.
pub fn optimize_helstrom(
    nbar: f64,
    noise: &PhaseNoise,
    resolution: usize,
) -> Result<HelstromOptimum> {
    if !(nbar.is_finite() && nbar > 0.0) {
        return Err(invalid(format!(
            "power budget must be positive, got {nbar}"
        )));
    }
    if resolution < 2 {
        return Err(invalid("grid resolution must be at least 2"));
    }
    let step = PI / resolution as f64;
    let eval = |theta: f64| perr_helstrom(&parametrize(theta, nbar), noise);
    let grid: Vec<Result<f64>> = (0..resolution)
        .into_par_iter()
        .map(|i| eval(i as f64 * step))
        .collect();
    let mut best = (0.0, f64::INFINITY);
    for (i, v) in grid.into_iter().enumerate() {
        let v = v?;
        if v < best.1 {
            best = (i as f64 * step, v);
        }
    }
    let (theta, perr) = golden_section_min(eval, best.0 - step, best.0 + step, 1e-7)?;
    let (theta, perr) = if perr < best.1 { (theta, perr) } else { best };
    Ok(HelstromOptimum {
        theta,
        constellation: parametrize(theta, nbar),
        perr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::make_bpsk;
    use crate::receivers::perr_generalized_kennedy;

    fn noise(sigma: f64) -> PhaseNoise {
        PhaseNoise::new(sigma).unwrap()
    }

    #[test]
    fn parametrization_examples() {
        let ook = parametrize(PI / 2.0, 2.0);
        assert!(ook.alpha0.re.abs() < 1e-15);
        assert!((ook.alpha1.re - 2.0).abs() < 1e-15);
        let bpsk = parametrize(3.0 * PI / 4.0, 2.0);
        let reference = make_bpsk(2.0).unwrap();
        assert!((bpsk.alpha0.re - reference.alpha0.re).abs() < 1e-15);
        assert!((bpsk.alpha1.re - reference.alpha1.re).abs() < 1e-15);
        for i in 0..50 {
            let c = parametrize(i as f64 * 0.37, 2.0);
            assert!((c.mean_photon_number() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) =
            golden_section_min(|x| Ok((x - 0.3) * (x - 0.3) + 1.0), -1.0, 2.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn problem_validation() {
        assert!(OptimizationProblem::new(0.0, noise(0.1), 1).is_err());
        assert!(OptimizationProblem::new(1.0, noise(0.1), 0).is_err());
        let mut p = OptimizationProblem::new(1.0, noise(0.1), 2).unwrap();
        p.refine_tolerance = 0.0;
        assert!(optimize(&p).is_err());
    }

    #[test]
    fn tie_break_prefers_small_threshold_then_small_displacement() {
        let a = Candidate {
            perr: 0.1,
            threshold_k: 1,
            theta: 0.0,
            beta: 0.1,
            orientation: Orientation::Swapped,
        };
        let b = Candidate {
            perr: 0.1 + 1e-13,
            threshold_k: 0,
            theta: 0.0,
            beta: 0.5,
            orientation: Orientation::Swapped,
        };
        assert!(better(&b, &a));
        let c = Candidate { beta: 0.2, ..b };
        assert!(better(&c, &b));
        let d = Candidate { perr: 0.09, ..a };
        assert!(better(&d, &c));
        let mirror = Candidate {
            beta: -(d.beta + 1e-9),
            orientation: Orientation::Standard,
            ..d
        };
        assert!(better(&mirror, &d));
        assert!(!better(&d, &mirror));
    }

    #[test]
    fn coarse_noiseless_run_beats_kennedy() {
        let p = OptimizationProblem {
            grid_resolution: 61,
            beta_resolution: 61,
            ..OptimizationProblem::new(2.0, noise(0.0), 3).unwrap()
        };
        let r = optimize(&p).unwrap();
        assert!(r.perr <= 0.5 * (-8.0f64).exp());
        assert!(r.perr <= r.grid_best);
        assert!(r.perr >= r.perr_helstrom);
        let again = perr_generalized_kennedy(&r.constellation, &r.config, &p.noise).unwrap();
        assert!((again - r.perr).abs() <= 1e-12);
    }

    #[test]
    fn helstrom_optimum_without_noise_is_bpsk() {
        let h = optimize_helstrom(1.0, &noise(0.0), 31).unwrap();
        let expected = crate::receivers::perr_helstrom_noiseless(&make_bpsk(1.0).unwrap());
        assert!((h.perr - expected).abs() < 1e-10);
        let sep = h.constellation.separation_sqr();
        assert!((sep - 4.0).abs() < 1e-6);
    }
}
