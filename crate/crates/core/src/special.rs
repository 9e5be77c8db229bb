//! Small special-function helpers shared by the receiver and state models.

use std::sync::OnceLock;

const LN_FACTORIAL_TABLE: usize = 1024;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LN_FACTORIAL_TABLE);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..LN_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            table.push(acc);
        }
        table
    })
}

/// ln(k!)
pub(crate) fn ln_factorial(k: usize) -> f64 {
    match ln_factorial_table().get(k) {
        Some(v) => *v,
        None => libm::lgamma(k as f64 + 1.0),
    }
}

/// Poisson probability of `k` counts at mean `mean`, evaluated in log space.
pub(crate) fn poisson_pmf(k: usize, mean: f64) -> f64 {
    if mean <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mean.ln() - mean - ln_factorial(k)).exp()
}

/// Lower and upper Poisson tails at threshold `k`: (P[n <= k], P[n > k]).
///
/// The larger tail is the complement of the smaller one, so the pair sums to
/// one exactly. When the upper tail is the smaller one it comes from the
/// regularized incomplete gamma series `pₖ₊₁·Σ μⁿ/((k+2)⋯(k+1+n))`, which
/// keeps full relative accuracy where `1 − lower` would cancel.
pub(crate) fn poisson_tails(k: usize, mean: f64) -> (f64, f64) {
    if mean <= 0.0 {
        return (1.0, 0.0);
    }
    if mean < (k + 1) as f64 {
        let (mut term, mut sum) = (1.0f64, 1.0f64);
        let mut j = k + 1;
        while term > 0.5 * f64::EPSILON * sum {
            j += 1;
            term *= mean / j as f64;
            sum += term;
        }
        let upper = (poisson_pmf(k + 1, mean) * sum).min(1.0);
        (1.0 - upper, upper)
    } else {
        let lower: f64 = (0..=k).map(|n| poisson_pmf(n, mean)).sum();
        let lower = lower.min(1.0);
        (lower, 1.0 - lower)
    }
}

pub(crate) fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
