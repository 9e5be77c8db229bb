//! Command-line front end.
//!
//! Reports go to stdout as `key = value` lines; tables are CSV with a
//! `#`-prefixed manifest (see [`csv`]). Exit codes: 0 success, 2 usage
//! error, 3 I/O error, 4 numerical failure.

pub mod csv;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::constellation::{
    make_bpsk, make_ook, psd_watts_per_hz, BinaryConstellation, ComplexAmplitude,
    TELECOM_WAVELENGTH,
};
use crate::error::Error;
use crate::helstrom::{fock_dimension, perr_helstrom};
use crate::montecarlo::{kennedy_trials, simulate_perr, Scheme, TrialConfig};
use crate::optimizer::{
    optimize, optimize_helstrom, parametrize, sweep_sigma, OptimizationProblem,
    DEFAULT_BETA_POINTS, DEFAULT_THETA_POINTS,
};
use crate::phasenoise::PhaseNoise;
use crate::receivers::{
    perr_bpsk_hom, perr_helstrom_noiseless, perr_kennedy, perr_ook_dd, perr_sql_baseline,
    photocount_distribution, sql_baseline, Orientation, ReceiverConfig,
};
use csv::{num, write_csv, RunManifest};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "binrx",
    version,
    about = "Binary coherent-state receivers under phase noise"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Detector efficiency; amplitudes are scaled by √η before anything else.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub efficiency: f64,
    /// Convergence tolerance of the phase average.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tolerance: f64,
    /// Monte Carlo seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Modulation {
    Ook,
    Bpsk,
    /// Constellation on the power circle that minimizes the Helstrom limit.
    Optimal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conventional-detection error probabilities and their minimum.
    Sql {
        #[arg(long)]
        nbar: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        /// Also sample both conventional receivers with this many trials.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Noiseless error probabilities against mean photon number.
    SweepNbar {
        #[arg(long, default_value_t = 0.0)]
        nbar_min: f64,
        #[arg(long, default_value_t = 10.0)]
        nbar_max: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Optimized generalized Kennedy receiver against phase-noise strength.
    SweepSigma {
        #[arg(long, default_value_t = 2.0)]
        nbar: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma_min: f64,
        #[arg(long, default_value_t = 0.6)]
        sigma_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// PNR ceilings, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,8")]
        pnr: Vec<u32>,
        #[arg(long, default_value_t = DEFAULT_THETA_POINTS)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_BETA_POINTS)]
        beta_grid: usize,
        /// θ grid for the Helstrom-optimal constellation.
        #[arg(long, default_value_t = 91)]
        helstrom_grid: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Optimize constellation, displacement and threshold at one point.
    Optimize {
        #[arg(long)]
        nbar: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 8)]
        pnr: u32,
        #[arg(long, default_value_t = DEFAULT_THETA_POINTS)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_BETA_POINTS)]
        beta_grid: usize,
        /// Check the optimum against this many Monte Carlo trials.
        #[arg(long, visible_alias = "trials")]
        validate: Option<u64>,
        /// Write the refinement trace as CSV.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Photocount distribution of a displaced, dephased coherent state.
    #[command(allow_negative_numbers = true)]
    Pk {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha_im: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        beta_im: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Helstrom limit for a constellation under phase noise.
    Helstrom {
        #[arg(long)]
        nbar: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, value_enum, default_value_t = Modulation::Bpsk)]
        modulation: Modulation,
        /// Place the amplitudes at this angle on the power circle instead.
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 91)]
        grid: usize,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Numerical(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Constraint { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let c = &cli.common;
    if !(c.efficiency > 0.0 && c.efficiency <= 1.0) {
        return Err(CliError::Usage(format!(
            "efficiency must lie in (0, 1], got {}",
            c.efficiency
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", c.jobs)))?;
    pool.install(|| match &cli.command {
        Command::Sql {
            nbar,
            sigma,
            trials,
        } => cmd_sql(c, *nbar, *sigma, *trials),
        Command::SweepNbar {
            nbar_min,
            nbar_max,
            step,
            output,
        } => cmd_sweep_nbar(c, *nbar_min, *nbar_max, *step, output.as_ref()),
        Command::SweepSigma {
            nbar,
            sigma_min,
            sigma_max,
            step,
            pnr,
            grid,
            beta_grid,
            helstrom_grid,
            output,
        } => cmd_sweep_sigma(
            c,
            &SigmaSweep {
                nbar: *nbar,
                sigmas: range(*sigma_min, *sigma_max, *step)?,
                pnr: pnr.clone(),
                grid: *grid,
                beta_grid: *beta_grid,
                helstrom_grid: *helstrom_grid,
            },
            output.as_ref(),
        ),
        Command::Optimize {
            nbar,
            sigma,
            pnr,
            grid,
            beta_grid,
            validate,
            output,
        } => cmd_optimize(
            c,
            *nbar,
            *sigma,
            *pnr,
            *grid,
            *beta_grid,
            *validate,
            output.as_ref(),
        ),
        Command::Pk {
            alpha,
            alpha_im,
            beta,
            beta_im,
            sigma,
            output,
        } => cmd_pk(
            c,
            ComplexAmplitude::new(*alpha, *alpha_im),
            ComplexAmplitude::new(*beta, *beta_im),
            *sigma,
            output.as_ref(),
        ),
        Command::Helstrom {
            nbar,
            sigma,
            modulation,
            theta,
            grid,
        } => cmd_helstrom(c, *nbar, *sigma, *modulation, *theta, *grid),
    })
}

/// `min, min + step, …` up to `max` inclusive, rounded to 12 decimals so
/// that grid values print cleanly.
fn range(min: f64, max: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(step > 0.0 && step.is_finite() && min.is_finite() && max.is_finite() && max >= min) {
        return Err(CliError::Usage(format!(
            "invalid range {min}..{max} with step {step}"
        )));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| ((min + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn noise(c: &Common, sigma: f64) -> CliResult<PhaseNoise> {
    Ok(PhaseNoise::new(sigma)?.with_tolerance(c.tolerance)?)
}

fn report(lines: &[(&str, String)]) {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for (k, v) in lines {
        let _ = writeln!(out, "{k} = {v}");
    }
}

fn emit(
    output: Option<&PathBuf>,
    manifest: &RunManifest,
    columns: &[&str],
    rows: &[Vec<String>],
) -> CliResult<()> {
    match output {
        Some(path) => {
            let io = |source| CliError::Io {
                path: path.display().to_string(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(io)?);
            write_csv(&mut w, manifest, columns, rows).map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            write_csv(&mut stdout.lock(), manifest, columns, rows).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

fn cmd_sql(c: &Common, nbar: f64, sigma: f64, trials: Option<u64>) -> CliResult<()> {
    let noise = noise(c, sigma)?;
    let n = c.efficiency * nbar;
    let b = sql_baseline(n, &noise)?;
    let mut lines = vec![
        ("nbar", nbar.to_string()),
        ("sigma", sigma.to_string()),
        ("efficiency", c.efficiency.to_string()),
        ("perr_ook_dd", num(b.ook_dd)),
        ("perr_bpsk_hom", num(b.bpsk_hom)),
        ("perr_sql", num(b.sql)),
        ("sql_branch", b.branch.as_str().to_string()),
    ];
    if let Some(trials) = trials {
        let direct = ReceiverConfig::new(ComplexAmplitude::ZERO, 0, 1)?;
        let dd = simulate_perr(
            &make_ook(n)?,
            &noise,
            &kennedy_trials(direct, Orientation::Standard, trials, c.seed),
        )?;
        let hom = simulate_perr(
            &make_bpsk(n)?,
            &noise,
            &TrialConfig {
                trials,
                seed: c.seed,
                scheme: Scheme::Homodyne,
            },
        )?;
        lines.extend([
            ("mc_trials", trials.to_string()),
            ("mc_ook_dd", num(dd.estimate)),
            ("z_ook_dd", format!("{:.3}", dd.z_score(b.ook_dd))),
            ("mc_bpsk_hom", num(hom.estimate)),
            ("z_bpsk_hom", format!("{:.3}", hom.z_score(b.bpsk_hom))),
        ]);
    }
    report(&lines);
    Ok(())
}

fn cmd_sweep_nbar(
    c: &Common,
    nbar_min: f64,
    nbar_max: f64,
    step: f64,
    output: Option<&PathBuf>,
) -> CliResult<()> {
    if nbar_min < 0.0 {
        return Err(CliError::Usage("nbar-min must be non-negative".into()));
    }
    let grid = range(nbar_min, nbar_max, step)?;
    let noiseless = PhaseNoise::noiseless();
    let mut rows = Vec::with_capacity(grid.len());
    for &nbar in &grid {
        let n = c.efficiency * nbar;
        rows.push(vec![
            num(nbar),
            num(psd_watts_per_hz(nbar, TELECOM_WAVELENGTH)?),
            num(perr_ook_dd(n)),
            num(perr_bpsk_hom(n, &noiseless)?),
            num(perr_kennedy(n, &noiseless)?),
            num(perr_helstrom_noiseless(&make_bpsk(n)?)),
        ]);
    }
    let manifest = RunManifest::new("sweep-nbar")
        .param("nbar_min", nbar_min)
        .param("nbar_max", nbar_max)
        .param("step", step)
        .param("efficiency", c.efficiency)
        .param("wavelength_m", TELECOM_WAVELENGTH);
    emit(
        output,
        &manifest,
        &[
            "nbar",
            "psd_w_per_hz",
            "perr_ook_dd",
            "perr_bpsk_hom",
            "perr_kennedy",
            "perr_helstrom",
        ],
        &rows,
    )
}

struct SigmaSweep {
    nbar: f64,
    sigmas: Vec<f64>,
    pnr: Vec<u32>,
    grid: usize,
    beta_grid: usize,
    helstrom_grid: usize,
}

fn cmd_sweep_sigma(c: &Common, s: &SigmaSweep, output: Option<&PathBuf>) -> CliResult<()> {
    let mut pnrs = s.pnr.clone();
    pnrs.sort_unstable();
    pnrs.dedup();
    let largest = *pnrs
        .last()
        .ok_or_else(|| CliError::Usage("at least one PNR ceiling is required".into()))?;
    let n = c.efficiency * s.nbar;
    let template = OptimizationProblem {
        grid_resolution: s.grid,
        beta_resolution: s.beta_grid,
        ..OptimizationProblem::new(n, noise(c, 0.0)?, largest)?
    };
    template.validate()?;
    for &sigma in &s.sigmas {
        noise(c, sigma)?;
    }

    let cells = sweep_sigma(&template, &s.sigmas, &pnrs)?;
    let side: Vec<(Option<f64>, Option<f64>)> = s
        .sigmas
        .par_iter()
        .map(|&sigma| {
            let noise = noise(c, sigma).expect("validated above");
            let sql = perr_sql_baseline(n, &noise)
                .map_err(|e| eprintln!("warning: sigma = {sigma}: SQL baseline failed: {e}"))
                .ok();
            let hel = optimize_helstrom(n, &noise, s.helstrom_grid)
                .map_err(|e| eprintln!("warning: sigma = {sigma}: Helstrom optimum failed: {e}"))
                .ok();
            (sql, hel.map(|h| h.perr))
        })
        .collect();

    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let mut rows = Vec::with_capacity(s.sigmas.len());
    for (i, &sigma) in s.sigmas.iter().enumerate() {
        let mut per_pnr = Vec::with_capacity(pnrs.len());
        let mut best = None;
        for &p in &pnrs {
            let cell = cells
                .iter()
                .find(|cell| cell.pnr_ceiling == p && cell.sigma == sigma)
                .expect("every (pnr, sigma) pair has a cell");
            match &cell.outcome {
                Ok(r) => {
                    per_pnr.push(num(r.perr));
                    if p == largest {
                        best = Some(r);
                    }
                }
                Err(e) => {
                    eprintln!("warning: sigma = {sigma}, pnr = {p}: {e}");
                    per_pnr.push(String::new());
                }
            }
        }
        let mut row = vec![num(sigma), opt(side[i].0)];
        row.push(opt(best.map(|r| r.perr_helstrom)));
        row.push(opt(side[i].1));
        row.extend(per_pnr);
        match best {
            Some(r) => row.extend([
                num(r.constellation.alpha0.re),
                num(r.constellation.alpha1.re),
                num(r.config.beta.re),
                r.config.threshold_k.to_string(),
                r.orientation.as_str().to_string(),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        rows.push(row);
    }

    let pnr_columns: Vec<String> = pnrs.iter().map(|p| format!("perr_pnr{p}")).collect();
    let mut columns = vec![
        "sigma",
        "perr_sql",
        "perr_helstrom",
        "perr_helstrom_optimal",
    ];
    columns.extend(pnr_columns.iter().map(String::as_str));
    columns.extend(["alpha0", "alpha1", "beta", "threshold_k", "orientation"]);
    let pnr_list: Vec<String> = pnrs.iter().map(u32::to_string).collect();
    let manifest = RunManifest::new("sweep-sigma")
        .param("nbar", s.nbar)
        .param("sigmas", s.sigmas.len())
        .param("sigma_min", s.sigmas[0])
        .param("sigma_max", s.sigmas[s.sigmas.len() - 1])
        .param("pnr", pnr_list.join(";"))
        .param("grid", s.grid)
        .param("beta_grid", s.beta_grid)
        .param("helstrom_grid", s.helstrom_grid)
        .param("efficiency", c.efficiency)
        .param("tolerance", format!("{:e}", c.tolerance))
        .param("optimizer_columns_pnr", largest);
    emit(output, &manifest, &columns, &rows)
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    c: &Common,
    nbar: f64,
    sigma: f64,
    pnr: u32,
    grid: usize,
    beta_grid: usize,
    validate: Option<u64>,
    output: Option<&PathBuf>,
) -> CliResult<()> {
    let noise = noise(c, sigma)?;
    let problem = OptimizationProblem {
        grid_resolution: grid,
        beta_resolution: beta_grid,
        ..OptimizationProblem::new(c.efficiency * nbar, noise, pnr)?
    };
    problem.validate()?;
    let r = optimize(&problem)?;
    let mut lines = vec![
        ("nbar", nbar.to_string()),
        ("sigma", sigma.to_string()),
        ("pnr_ceiling", pnr.to_string()),
        ("efficiency", c.efficiency.to_string()),
        ("theta", num(r.theta)),
        ("alpha0", num(r.constellation.alpha0.re)),
        ("alpha1", num(r.constellation.alpha1.re)),
        ("beta", num(r.config.beta.re)),
        ("threshold_k", r.config.threshold_k.to_string()),
        ("orientation", r.orientation.as_str().to_string()),
        ("perr", num(r.perr)),
        ("perr_sql", num(r.perr_sql)),
        ("perr_helstrom", num(r.perr_helstrom)),
        ("sub_sql", (r.perr < r.perr_sql).to_string()),
        ("helstrom_ratio", format!("{:.6}", r.perr / r.perr_helstrom)),
        ("grid_best", num(r.grid_best)),
        ("refinement_cycles", (r.trace.len() - 1).to_string()),
    ];
    if let Some(trials) = validate {
        let e = simulate_perr(
            &r.constellation,
            &problem.noise,
            &kennedy_trials(r.config, r.orientation, trials, c.seed),
        )?;
        lines.extend([
            ("mc_trials", trials.to_string()),
            ("mc_seed", c.seed.to_string()),
            ("mc_estimate", num(e.estimate)),
            ("mc_std_error", num(e.std_error)),
            ("z_score", format!("{:.3}", e.z_score(r.perr))),
        ]);
    }
    if let Some(path) = output {
        let rows: Vec<Vec<String>> = r
            .trace
            .iter()
            .map(|t| vec![t.iteration.to_string(), num(t.perr)])
            .collect();
        let manifest = RunManifest::new("optimize")
            .param("nbar", nbar)
            .param("sigma", sigma)
            .param("pnr", pnr)
            .param("grid", grid)
            .param("beta_grid", beta_grid)
            .param("efficiency", c.efficiency)
            .param("tolerance", format!("{:e}", c.tolerance));
        emit(Some(path), &manifest, &["iteration", "perr"], &rows)?;
        lines.push(("trace", path.display().to_string()));
    }
    report(&lines);
    Ok(())
}

fn cmd_pk(
    c: &Common,
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    sigma: f64,
    output: Option<&PathBuf>,
) -> CliResult<()> {
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(CliError::Usage("amplitudes must be finite".into()));
    }
    let scale = c.efficiency.sqrt();
    let d = photocount_distribution(alpha.scale(scale), beta.scale(scale), &noise(c, sigma)?)?;
    let rows: Vec<Vec<String>> = d
        .probs
        .iter()
        .enumerate()
        .map(|(k, p)| vec![k.to_string(), num(*p)])
        .collect();
    let manifest = RunManifest::new("pk")
        .param("alpha", alpha)
        .param("beta", beta)
        .param("sigma", sigma)
        .param("efficiency", c.efficiency)
        .param("tolerance", format!("{:e}", c.tolerance))
        .param("truncation", d.truncation)
        .param("tail_mass", num(d.tail_mass));
    emit(output, &manifest, &["k", "p"], &rows)
}

fn cmd_helstrom(
    c: &Common,
    nbar: f64,
    sigma: f64,
    modulation: Modulation,
    theta: Option<f64>,
    grid: usize,
) -> CliResult<()> {
    let noise = noise(c, sigma)?;
    let n = c.efficiency * nbar;
    if !(n.is_finite() && n >= 0.0) {
        return Err(CliError::Usage(format!(
            "nbar must be non-negative, got {nbar}"
        )));
    }
    let (label, constellation): (String, BinaryConstellation) = match (theta, modulation) {
        (Some(t), _) => (format!("theta={t}"), parametrize(t, n)),
        (None, Modulation::Ook) => ("ook".into(), make_ook(n)?),
        (None, Modulation::Bpsk) => ("bpsk".into(), make_bpsk(n)?),
        (None, Modulation::Optimal) => (
            "optimal".into(),
            optimize_helstrom(n, &noise, grid)?.constellation,
        ),
    };
    let perr = perr_helstrom(&constellation, &noise)?;
    let max_photons = constellation
        .alpha0
        .norm_sqr()
        .max(constellation.alpha1.norm_sqr());
    let mut lines = vec![
        ("nbar", nbar.to_string()),
        ("sigma", sigma.to_string()),
        ("efficiency", c.efficiency.to_string()),
        ("constellation", label),
        ("alpha0", constellation.alpha0.to_string()),
        ("alpha1", constellation.alpha1.to_string()),
        ("fock_dimension", fock_dimension(max_photons).to_string()),
        ("perr_helstrom", num(perr)),
    ];
    if noise.is_noiseless() {
        lines.push((
            "perr_helstrom_pure",
            num(perr_helstrom_noiseless(&constellation)),
        ));
    }
    report(&lines);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_include_both_ends_and_print_cleanly() {
        let r = range(0.0, 0.6, 0.05).unwrap();
        assert_eq!(r.len(), 13);
        assert_eq!(r[9], 0.45);
        assert_eq!(r[12], 0.6);
        assert_eq!(range(0.0, 10.0, 0.1).unwrap()[20], 2.0);
        assert_eq!(range(1.0, 1.0, 0.5).unwrap(), vec![1.0]);
        assert!(range(0.0, 1.0, 0.0).is_err());
        assert!(range(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(
            CliError::from(Error::InvalidArgument("x".into())).exit_code(),
            EXIT_USAGE
        );
        assert_eq!(
            CliError::from(Error::Constraint {
                threshold: 3,
                ceiling: 2
            })
            .exit_code(),
            EXIT_USAGE
        );
        let conv = Error::Convergence {
            order: 512,
            previous: 0.0,
            last: 1.0,
        };
        assert_eq!(CliError::from(conv).exit_code(), EXIT_NUMERICAL);
    }

    #[test]
    fn malformed_flags_are_usage_errors() {
        assert_eq!(run(["binrx", "sql"]), EXIT_USAGE);
        assert_eq!(run(["binrx", "sql", "--nbar", "two"]), EXIT_USAGE);
        assert_eq!(run(["binrx", "sql", "--nbar", "-1"]), EXIT_USAGE);
        assert_eq!(run(["binrx", "frobnicate"]), EXIT_USAGE);
    }
}
