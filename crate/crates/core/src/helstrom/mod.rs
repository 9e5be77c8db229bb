//! Helstrom limit for phase-diffused coherent states.
//!
//! A coherent state `|α⟩` sent through the phase-noise channel becomes the
//! mixed state with Fock-basis elements
//!
//! ```text
//! ρ_{mn} = e^{-|α|²} α^m (α*)^n / √(m! n!) · e^{-(m-n)²σ²/2}
//! ```
//!
//! where the last factor is the Gaussian average `⟨e^{i(m-n)φ}⟩`. The
//! minimum error probability for discriminating two equiprobable states is
//! `½(1 − ½‖ρ₁ − ρ₀‖₁)`, evaluated here from the eigenvalues of the
//! truncated difference matrix.

mod jacobi;

pub use jacobi::{symmetric_eigen, SymmetricEigen};

use crate::constellation::{BinaryConstellation, ComplexAmplitude};
use crate::error::{Error, Result};
use crate::phasenoise::PhaseNoise;
use crate::receivers::truncation_bound;
use crate::special::{ln_factorial, poisson_pmf};

/// Largest Poisson mass allowed beyond the truncated Fock space.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Fock dimension for states with mean photon number up to `max_photons`.
pub fn fock_dimension(max_photons: f64) -> usize {
    truncation_bound(max_photons)
}

/// Poisson mass at photon numbers `>= dim`, summed term by term.
pub fn poisson_tail_beyond(mean: f64, dim: usize) -> f64 {
    if mean <= 0.0 {
        return if dim == 0 { 1.0 } else { 0.0 };
    }
    let mut total = 0.0;
    let mut n = dim;
    loop {
        let term = poisson_pmf(n, mean);
        total += term;
        if (n as f64) > mean && term <= 1e-18 * total.max(1e-300) {
            return total;
        }
        n += 1;
    }
}

/// Truncated Fock-space density matrix, stored row-major as separate real
/// and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl FockDensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(Re ρ_{mn}, Im ρ_{mn})`
    pub fn get(&self, m: usize, n: usize) -> (f64, f64) {
        let i = m * self.dim + n;
        (self.re[i], self.im[i])
    }

    pub fn real_part(&self) -> &[f64] {
        &self.re
    }

    pub fn imag_part(&self) -> &[f64] {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(|&x| x == 0.0)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.re[i * self.dim + i]).sum()
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_{mn}|² for Hermitian ρ
        self.re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| r * r + i * i)
            .sum()
    }

    /// Largest deviation from `ρ_{mn} = conj(ρ_{nm})`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let (r1, i1) = self.get(a, b);
                let (r2, i2) = self.get(b, a);
                worst = worst.max((r1 - r2).abs()).max((i1 + i2).abs());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(self.dim, &self.re, &self.im)
    }

    fn difference(&self, other: &Self) -> (Vec<f64>, Vec<f64>) {
        let re = self.re.iter().zip(&other.re).map(|(a, b)| a - b).collect();
        let im = self.im.iter().zip(&other.im).map(|(a, b)| a - b).collect();
        (re, im)
    }
}

/// Eigenvalues of the Hermitian matrix `re + i·im`.
///
/// Real matrices go straight to Jacobi. Complex ones are embedded as the
/// real symmetric `[[A, −B], [B, A]]`, whose spectrum is that of `A + iB`
/// with every eigenvalue doubled.
fn hermitian_eigenvalues(dim: usize, re: &[f64], im: &[f64]) -> Result<Vec<f64>> {
    if im.iter().all(|&x| x == 0.0) {
        return Ok(symmetric_eigen(re, dim, false)?.values);
    }
    let n2 = 2 * dim;
    let mut embedded = vec![0.0; n2 * n2];
    for m in 0..dim {
        for n in 0..dim {
            let a = re[m * dim + n];
            let b = im[m * dim + n];
            embedded[m * n2 + n] = a;
            embedded[(m + dim) * n2 + n + dim] = a;
            embedded[m * n2 + n + dim] = -b;
            embedded[(m + dim) * n2 + n] = b;
        }
    }
    let doubled = symmetric_eigen(&embedded, n2, false)?.values;
    Ok(doubled
        .chunks_exact(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect())
}

/// Density matrix of the coherent state `alpha` after the phase-noise
/// channel, truncated to `dim` Fock levels.
///
/// Fails when more than [`TAIL_TOLERANCE`] of the photon-number
/// distribution lies beyond `dim`.
pub fn phase_diffused_state(
    alpha: ComplexAmplitude,
    noise: &PhaseNoise,
    dim: usize,
) -> Result<FockDensityMatrix> {
    let mean = alpha.norm_sqr();
    if dim == 0 || poisson_tail_beyond(mean, dim) > TAIL_TOLERANCE {
        return Err(Error::DimensionTooSmall {
            requested: dim,
            required: fock_dimension(mean).max(1),
        });
    }
    let mut re = vec![0.0; dim * dim];
    let mut im = vec![0.0; dim * dim];
    if mean == 0.0 {
        re[0] = 1.0;
        return Ok(FockDensityMatrix { dim, re, im });
    }
    let ln_amp = 0.5 * mean.ln();
    let phase = alpha.arg();
    // ln|ψ_m| for the pure-state Fock amplitudes.
    let ln_psi: Vec<f64> = (0..dim)
        .map(|m| -0.5 * mean + m as f64 * ln_amp - 0.5 * ln_factorial(m))
        .collect();
    for m in 0..dim {
        for n in 0..dim {
            let diff = m as i64 - n as i64;
            let modulus = (ln_psi[m] + ln_psi[n]).exp() * noise.characteristic(diff);
            let (s, c) = (diff as f64 * phase).sin_cos();
            re[m * dim + n] = modulus * c;
            im[m * dim + n] = modulus * s;
        }
    }
    if alpha.is_real() {
        // sin(kπ) is not exactly zero in floating point.
        im.iter_mut().for_each(|x| *x = 0.0);
    }
    Ok(FockDensityMatrix { dim, re, im })
}

/// Eigenvalues of `ρ₁ − ρ₀` for the two phase-diffused symbols, at the
/// common truncation set by the brighter one.
pub fn difference_eigenvalues(c: &BinaryConstellation, noise: &PhaseNoise) -> Result<Vec<f64>> {
    let dim = fock_dimension(c.alpha0.norm_sqr().max(c.alpha1.norm_sqr()));
    let rho0 = phase_diffused_state(c.alpha0, noise, dim)?;
    let rho1 = phase_diffused_state(c.alpha1, noise, dim)?;
    let (re, im) = rho1.difference(&rho0);
    hermitian_eigenvalues(dim, &re, &im)
}

/// Minimum error probability over all measurements for the two
/// phase-diffused symbols of `c`.
pub fn perr_helstrom(c: &BinaryConstellation, noise: &PhaseNoise) -> Result<f64> {
    let trace_norm: f64 = difference_eigenvalues(c, noise)?
        .iter()
        .map(|l| l.abs())
        .sum();
    Ok((0.5 * (1.0 - 0.5 * trace_norm)).clamp(0.0, 0.5))
}
