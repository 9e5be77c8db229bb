//! Error probabilities for binary coherent-state constellations sent over a
//! Gaussian phase-noise channel.
//!
//! The crate covers the conventional receivers (direct detection and
//! homodyne), the Kennedy receiver and its generalization with an arbitrary
//! displacement and a photon-number-resolving threshold, and the
//! quantum-optimal Helstrom limit for phase-diffused states. The
//! [`optimizer`] module searches constellation, displacement and count
//! threshold jointly under an average-power budget, and [`montecarlo`]
//! provides an independent sampling check of every analytic formula.
//!
//! ```
//! use binrx::constellation::make_bpsk;
//! use binrx::phasenoise::PhaseNoise;
//! use binrx::receivers::{perr_generalized_kennedy, ReceiverConfig};
//!
//! let bpsk = make_bpsk(2.0).unwrap();
//! // Null the first symbol and detect with an on/off detector.
//! let cfg = ReceiverConfig::new(-bpsk.alpha0, 0, 1).unwrap();
//! let noise = PhaseNoise::new(0.0).unwrap();
//! let perr = perr_generalized_kennedy(&bpsk, &cfg, &noise).unwrap();
//! assert!((perr - 0.5 * (-8.0f64).exp()).abs() < 1e-15);
//! ```

pub mod cli;
pub mod constellation;
pub mod error;
pub mod helstrom;
pub mod montecarlo;
pub mod optimizer;
pub mod phasenoise;
pub mod receivers;
mod special;

pub use constellation::{BinaryConstellation, ComplexAmplitude};
pub use error::{Error, Result};
pub use phasenoise::PhaseNoise;
pub use receivers::ReceiverConfig;
