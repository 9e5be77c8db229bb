//! Gaussian phase-diffusion averages.
//!
//! A phase-noise channel multiplies a field amplitude by `e^{iφ}` with `φ`
//! drawn from a zero-mean normal distribution of standard deviation `σ`.
//! Every detection probability in this crate is averaged over that
//! distribution here, with Gauss–Hermite quadrature: substituting
//! `φ = √2·σ·t` turns the Gaussian weight into `e^{-t²}` exactly, and the
//! integrands met in practice are entire, so the rules converge spectrally.
//!
//! The integration runs over the whole real line; phases are never reduced
//! modulo 2π.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{invalid, Error, Result};

/// Controls for the adaptive order-doubling average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageSettings {
    /// Relative agreement required between two successive estimates, or
    /// absolute agreement once the value itself is below this number.
    pub tolerance: f64,
    pub base_order: usize,
    /// Hard cap on the rule order.
    pub max_order: usize,
}

impl Default for AverageSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            base_order: 32,
            max_order: 512,
        }
    }
}

impl AverageSettings {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(invalid(format!(
                "quadrature tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.base_order == 0 || self.max_order < self.base_order {
            return Err(invalid(format!(
                "quadrature orders must satisfy 1 <= base ({}) <= max ({})",
                self.base_order, self.max_order
            )));
        }
        Ok(())
    }
}

/// Gaussian phase noise of strength `sigma` (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseNoise {
    sigma: f64,
    settings: AverageSettings,
}

impl PhaseNoise {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(invalid(format!(
                "phase noise strength must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(Self {
            sigma,
            settings: AverageSettings::default(),
        })
    }

    pub fn noiseless() -> Self {
        Self {
            sigma: 0.0,
            settings: AverageSettings::default(),
        }
    }

    pub fn with_settings(mut self, settings: AverageSettings) -> Result<Self> {
        settings.validate()?;
        self.settings = settings;
        Ok(self)
    }

    pub fn with_tolerance(self, tolerance: f64) -> Result<Self> {
        let settings = AverageSettings {
            tolerance,
            ..self.settings
        };
        self.with_settings(settings)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn settings(&self) -> &AverageSettings {
        &self.settings
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma == 0.0
    }

    /// `⟨e^{imφ}⟩ = e^{-m²σ²/2}` in closed form.
    pub fn characteristic(&self, m: i64) -> f64 {
        let m = m as f64;
        (-0.5 * m * m * self.sigma * self.sigma).exp()
    }

    /// Gauss–Hermite rule of the given order for this noise strength.
    pub fn rule(&self, order: usize) -> Result<QuadratureRule> {
        build_rule(self, order)
    }

    /// Phase average `⟨f⟩_φ`, doubling the rule order until two successive
    /// estimates agree to the configured tolerance.
    pub fn average<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let values = self.average_many(1, |phi, out| out[0] = f(phi))?;
        Ok(values[0])
    }

    /// Averages a vector-valued integrand; `f(φ, out)` fills `out` with the
    /// `len` component values at phase `φ`. All components must converge.
    pub fn average_many<F>(&self, len: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(f64, &mut [f64]),
    {
        let mut scratch = vec![0.0; len];
        if self.is_noiseless() {
            f(0.0, &mut scratch);
            return Ok(scratch);
        }
        let AverageSettings {
            tolerance,
            base_order,
            max_order,
        } = self.settings;

        let (mut previous, _) = self.apply_rule(base_order, &f, &mut scratch);
        let mut order = base_order * 2;
        loop {
            let (current, magnitude) = self.apply_rule(order, &f, &mut scratch);
            let worst = previous
                .iter()
                .zip(&current)
                .zip(&magnitude)
                .map(|((&p, &c), &m)| (disagreement(p, c, m, tolerance), p, c))
                .fold((0.0, 0.0, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
            if worst.0 <= 1.0 {
                return Ok(current);
            }
            if order * 2 > max_order {
                return Err(Error::Convergence {
                    order,
                    previous: worst.1,
                    last: worst.2,
                });
            }
            previous = current;
            order *= 2;
        }
    }

    /// Rule estimate of every component together with the estimate of its
    /// absolute value, which sets the roundoff floor.
    fn apply_rule<F>(&self, order: usize, f: &F, scratch: &mut [f64]) -> (Vec<f64>, Vec<f64>)
    where
        F: Fn(f64, &mut [f64]),
    {
        let rule = standard_rule(order);
        let scale = std::f64::consts::SQRT_2 * self.sigma;
        let mut acc = vec![0.0; scratch.len()];
        let mut magnitude = vec![0.0; scratch.len()];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            if w == 0.0 {
                continue;
            }
            f(scale * t, scratch);
            for ((a, m), s) in acc.iter_mut().zip(magnitude.iter_mut()).zip(scratch.iter()) {
                *a += w * s;
                *m += w * s.abs();
            }
        }
        (acc, magnitude)
    }
}

/// Ratio of the change between estimates to the allowed change; converged
/// when at most 1.
///
/// The allowed change is `tolerance` relative to the value (absolute below
/// `tolerance`), but never less than the summation roundoff implied by the
/// integrand magnitude: an O(1) integrand with a tiny average cannot be
/// resolved below a few ulps of 1.
fn disagreement(previous: f64, current: f64, magnitude: f64, tolerance: f64) -> f64 {
    const ROUNDOFF_ULPS: f64 = 64.0;
    let diff = (current - previous).abs();
    let allowed = if current.abs() < tolerance {
        tolerance
    } else {
        tolerance * current.abs()
    };
    let floor = ROUNDOFF_ULPS * f64::EPSILON * magnitude;
    if diff == 0.0 {
        return 0.0;
    }
    diff / allowed.max(floor)
}

/// Discrete approximation of the phase distribution: `Σ wᵢ f(φᵢ) ≈ ⟨f⟩_φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&phi, &w)| w * f(phi))
            .sum()
    }
}

/// Builds the Gauss–Hermite rule of `order` nodes rescaled to the Gaussian
/// of width `noise.sigma()`. A noiseless channel yields the single node 0.
pub fn build_rule(noise: &PhaseNoise, order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(invalid("quadrature order must be at least 1"));
    }
    if noise.is_noiseless() {
        return Ok(QuadratureRule {
            nodes: vec![0.0],
            weights: vec![1.0],
        });
    }
    let rule = standard_rule(order);
    let scale = std::f64::consts::SQRT_2 * noise.sigma;
    Ok(QuadratureRule {
        nodes: rule.nodes.iter().map(|t| scale * t).collect(),
        weights: rule.weights.clone(),
    })
}

/// Nodes for weight `e^{-t²}/√π`, ascending, weights summing to one.
#[derive(Debug)]
struct StandardRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn standard_rule(order: usize) -> Arc<StandardRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<StandardRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().unwrap().get(&order) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(gauss_hermite(order));
    cache
        .lock()
        .unwrap()
        .entry(order)
        .or_insert_with(|| Arc::clone(&rule))
        .clone()
}

/// Orthonormal Hermite functions ψ_{n} and ψ_{n-1} at `z`.
///
/// Carrying the `e^{-z²/2}` factor keeps the recurrence finite for the
/// outermost nodes of high-order rules.
fn hermite_functions(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25) * (-0.5 * z * z).exp();
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, p2)
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal Hermite
/// Jacobi matrix (zero diagonal, off-diagonal `√(k/2)`), by Sturm count.
fn hermite_roots_below(n: usize, x: f64) -> usize {
    let mut count = 0;
    let mut q = -x;
    if q < 0.0 {
        count += 1;
    }
    for k in 1..n {
        let e2 = k as f64 / 2.0;
        let prev = if q == 0.0 { f64::EPSILON } else { q };
        q = -x - e2 / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gauss–Hermite rule: roots isolated by Sturm bisection on the Jacobi
/// matrix, polished by Newton steps on the Hermite functions, weights from
/// `w = e^{-z²} / (n ψ_{n-1}(z)²)`.
fn gauss_hermite(n: usize) -> StandardRule {
    let nf = n as f64;
    let upper = (2.0 * nf + 1.0).sqrt() + 1.0;
    let first_positive = n / 2;
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for index in first_positive..n {
        let mut root = 0.0;
        if !(n % 2 == 1 && index == first_positive) {
            // The (index+1)-th smallest eigenvalue lies where the count
            // below crosses index.
            let (mut lo, mut hi) = (0.0f64, upper);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if hermite_roots_below(n, mid) > index {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            root = 0.5 * (lo + hi);
            for _ in 0..3 {
                let (pn, pn1) = hermite_functions(n, root);
                let step = pn / ((2.0 * nf).sqrt() * pn1);
                if !step.is_finite() || step.abs() > hi - lo + 1e-12 {
                    break;
                }
                root -= step;
            }
        }
        let (_, pn1) = hermite_functions(n, root);
        let w = (-root * root).exp() / (nf * pn1 * pn1);
        nodes[index] = root;
        weights[index] = w;
        nodes[n - 1 - index] = -root;
        weights[n - 1 - index] = w;
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    StandardRule { nodes, weights }
}
