//! Exact expectations over the binomial win count by summing the PMF.
//!
//! These sums make no independence assumption between wins and losses, so
//! they arbitrate between closed forms that do.

use crate::bernoulli::{pmf, BinomialSpec};
use crate::error::{KellyError, Result};

/// Largest trial count any enumeration will sum over.
pub const MAX_ENUMERATION_TRIALS: u64 = 1_000_000;

/// Cap for the exact wealth-variance oracle.
pub const VARIANCE_ORACLE_MAX_TRIALS: u64 = 10_000;

pub(crate) fn check_cap(what: &'static str, trials: u64, limit: u64) -> Result<()> {
    if trials > limit {
        Err(KellyError::Size {
            what,
            requested: trials,
            limit,
        })
    } else {
        Ok(())
    }
}

/// `Σ_α P(U = α) g(α)`, skipping outcomes of probability zero.
pub fn expectation(spec: BinomialSpec, g: impl Fn(u64) -> f64) -> Result<f64> {
    check_cap("enumeration trials", spec.trials(), MAX_ENUMERATION_TRIALS)?;
    let mut sum = 0.0;
    for wins in 0..=spec.trials() {
        let prob = pmf(spec, wins)?;
        if prob > 0.0 {
            sum += prob * g(wins);
        }
    }
    Ok(sum)
}

/// `E[w0 (1+F)^U (1-F)^(N-U)]` by enumeration.
pub fn expected_wealth(w0: f64, stake: f64, spec: BinomialSpec) -> Result<f64> {
    let n = spec.trials();
    expectation(spec, |a| w0 * terminal_factor(stake, a, n))
}

/// Exact `(E[W(N)], Var[W(N)])` by enumeration, capped at
/// [`VARIANCE_ORACLE_MAX_TRIALS`].
pub fn wealth_mean_variance(w0: f64, stake: f64, spec: BinomialSpec) -> Result<(f64, f64)> {
    check_cap(
        "variance oracle trials",
        spec.trials(),
        VARIANCE_ORACLE_MAX_TRIALS,
    )?;
    let n = spec.trials();
    let mean = expectation(spec, |a| w0 * terminal_factor(stake, a, n))?;
    let var = expectation(spec, |a| (w0 * terminal_factor(stake, a, n) - mean).powi(2))?;
    Ok((mean, var))
}

/// `(1+F)^wins (1-F)^(N-wins)`.
pub(crate) fn terminal_factor(stake: f64, wins: u64, trials: u64) -> f64 {
    let up = (1.0 + stake).powf(wins as f64);
    let losses = trials - wins;
    if losses == 0 {
        up
    } else {
        up * (1.0 - stake).powf(losses as f64)
    }
}
