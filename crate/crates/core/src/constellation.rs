//! Complex field amplitudes, binary constellations and the average-power
//! budget.
//!
//! Amplitudes are measured in √photons: `|α|²` is the mean photon number
//! carried by a symbol.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{invalid, Result};

/// Planck constant (J·s), exact SI value.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum (m/s), exact SI value.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Telecom C-band reference wavelength (m).
pub const TELECOM_WAVELENGTH: f64 = 1550e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexAmplitude {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmplitude {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    /// Mean photon number `|α|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(&self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// `α·e^{iφ}`
    pub fn rotate(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::new(self.re * c - self.im * s, self.re * s + self.im * c)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.re * factor, self.im * factor)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

impl Add for ComplexAmplitude {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ComplexAmplitude {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for ComplexAmplitude {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul<f64> for ComplexAmplitude {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl std::fmt::Display for ComplexAmplitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else if self.im < 0.0 {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Two equiprobable symbols; bit 0 is carried by `alpha0`, bit 1 by `alpha1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryConstellation {
    pub alpha0: ComplexAmplitude,
    pub alpha1: ComplexAmplitude,
}

impl BinaryConstellation {
    pub fn new(alpha0: ComplexAmplitude, alpha1: ComplexAmplitude) -> Result<Self> {
        if !(alpha0.is_finite() && alpha1.is_finite()) {
            return Err(invalid("constellation amplitudes must be finite"));
        }
        Ok(Self { alpha0, alpha1 })
    }

    /// Average photon number per symbol, `(|α₀|² + |α₁|²)/2`.
    pub fn mean_photon_number(&self) -> f64 {
        0.5 * (self.alpha0.norm_sqr() + self.alpha1.norm_sqr())
    }

    /// Squared distance `|α₁ − α₀|²` between the two symbols.
    pub fn separation_sqr(&self) -> f64 {
        (self.alpha1 - self.alpha0).norm_sqr()
    }

    pub fn rotate(&self, phi: f64) -> Self {
        Self {
            alpha0: self.alpha0.rotate(phi),
            alpha1: self.alpha1.rotate(phi),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            alpha0: self.alpha0.conj(),
            alpha1: self.alpha1.conj(),
        }
    }

    /// Both amplitudes multiplied by `factor` (e.g. `√η` for detector
    /// efficiency `η`).
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            alpha0: self.alpha0.scale(factor),
            alpha1: self.alpha1.scale(factor),
        }
    }

    pub fn is_real(&self) -> bool {
        self.alpha0.is_real() && self.alpha1.is_real()
    }
}

pub fn mean_photon_number(c: &BinaryConstellation) -> f64 {
    c.mean_photon_number()
}

fn check_nbar(nbar: f64) -> Result<()> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(invalid(format!(
            "mean photon number must be finite and non-negative, got {nbar}"
        )));
    }
    Ok(())
}

/// On-off keying: `(0, √(2n̄))`.
pub fn make_ook(nbar: f64) -> Result<BinaryConstellation> {
    check_nbar(nbar)?;
    Ok(BinaryConstellation {
        alpha0: ComplexAmplitude::ZERO,
        alpha1: ComplexAmplitude::real((2.0 * nbar).sqrt()),
    })
}

/// Binary phase shift keying: `(−√n̄, +√n̄)`.
pub fn make_bpsk(nbar: f64) -> Result<BinaryConstellation> {
    check_nbar(nbar)?;
    let a = nbar.sqrt();
    Ok(BinaryConstellation {
        alpha0: ComplexAmplitude::real(-a),
        alpha1: ComplexAmplitude::real(a),
    })
}

/// Signal power spectral density (W/Hz) of `nbar` photons per symbol at one
/// symbol per unit time-bandwidth product: `n̄·h·c/λ`.
pub fn psd_watts_per_hz(nbar: f64, wavelength: f64) -> Result<f64> {
    check_nbar(nbar)?;
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(invalid(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    Ok(nbar * PLANCK * SPEED_OF_LIGHT / wavelength)
}
