//! Shannon entropy of the single trial and of the binomial win count.

use std::f64::consts::LN_2;

use crate::bernoulli::{log_pmf, BinomialSpec, GameParams};
use crate::enumeration::{check_cap, MAX_ENUMERATION_TRIALS};
use crate::error::{check_probability, KellyError, Result};
use crate::kelly::{kelly_fraction, utility};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Base2,
}

impl LogBase {
    fn convert(self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            LogBase::Base2 => nats / LN_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropySource {
    SingleTrial,
    BinomialWins,
    BinomialLosses,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub h: f64,
    pub base: LogBase,
    pub source: EntropySource,
}

/// `x ln x` with `0 ln 0 = 0`.
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `H(p, q) = -p ln p - q ln q`.
pub fn shannon(p: f64, base: LogBase) -> Result<EntropyReport> {
    let p = check_probability("p", p)?;
    // Evaluate at (1 - big, big) so that p and 1 - p give bit-identical results.
    let big = if p >= 0.5 { p } else { 1.0 - p };
    let h = -xlogx(1.0 - big) - xlogx(big);
    Ok(EntropyReport {
        h: base.convert(h),
        base,
        source: EntropySource::SingleTrial,
    })
}

/// `dH/dp = ln((1 - p) / p)` in nats.
pub fn shannon_derivative(p: f64) -> f64 {
    ((1.0 - p) / p).ln()
}

/// The maximiser of `H`, where `ln((1-p)/p) = 0`.
pub fn shannon_argmax() -> f64 {
    0.5
}

/// Entropy of `U ~ Binomial(N, p)` as `-Σ P ln P`.
///
/// The result is cross-checked against the expanded three-sum form in
/// debug builds.
pub fn binomial_entropy(spec: BinomialSpec, base: LogBase) -> Result<EntropyReport> {
    let direct = binomial_entropy_direct(spec)?;
    debug_assert!({
        let expanded = binomial_entropy_three_sum(spec)?;
        (expanded - direct).abs() <= 1e-10 * direct.abs().max(1.0)
    });
    Ok(EntropyReport {
        h: base.convert(direct),
        base,
        source: EntropySource::BinomialWins,
    })
}

/// Entropy of the loss count `V ~ Binomial(N, q)`.
pub fn binomial_entropy_losses(spec: BinomialSpec, base: LogBase) -> Result<EntropyReport> {
    let mut report = binomial_entropy(spec.losses(), base)?;
    report.source = EntropySource::BinomialLosses;
    Ok(report)
}

fn binomial_entropy_direct(spec: BinomialSpec) -> Result<f64> {
    check_cap("entropy trials", spec.trials(), MAX_ENUMERATION_TRIALS)?;
    let mut h = 0.0;
    for a in 0..=spec.trials() {
        let lp = log_pmf(spec, a)?;
        if lp > f64::NEG_INFINITY {
            h -= lp.exp() * lp;
        }
    }
    Ok(h)
}

/// `-Σ P ln C(N,α) - Σ P α ln p - Σ P (N-α) ln q`, with `ln C` from log-gamma.
pub fn binomial_entropy_three_sum(spec: BinomialSpec) -> Result<f64> {
    three_sum(spec, |n, a| (n - a) as f64)
}

/// The expanded form with the loss term weighted by `α` rather than `N - α`.
///
/// Kept for the errata report: it only coincides with the entropy when the
/// loss term vanishes.
pub fn binomial_entropy_three_sum_alpha_weighted(spec: BinomialSpec) -> Result<f64> {
    three_sum(spec, |_, a| a as f64)
}

fn three_sum(spec: BinomialSpec, loss_weight: impl Fn(u64, u64) -> f64) -> Result<f64> {
    let n = spec.trials();
    check_cap("entropy trials", n, MAX_ENUMERATION_TRIALS)?;
    let (ln_p, ln_q) = (spec.p().ln(), spec.q().ln());
    let ln_n_fact = libm::lgamma(n as f64 + 1.0);
    let weighted = |w: f64, ln: f64| if w == 0.0 { 0.0 } else { w * ln };
    let (mut binom, mut wins, mut losses) = (0.0, 0.0, 0.0);
    for a in 0..=n {
        let prob = log_pmf(spec, a)?.exp();
        if prob == 0.0 {
            continue;
        }
        let ln_choose =
            ln_n_fact - libm::lgamma(a as f64 + 1.0) - libm::lgamma((n - a) as f64 + 1.0);
        binom -= prob * ln_choose;
        wins -= prob * weighted(a as f64, ln_p);
        losses -= prob * weighted(loss_weight(n, a), ln_q);
    }
    Ok(binom + wins + losses)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Compares `U(F_K, p)` with `ln 2 - H(p)`.
pub fn utility_entropy_identity(p: f64) -> Result<IdentityCheck> {
    let game = GameParams::new(p)?;
    if p < 0.5 {
        return Err(KellyError::NoEdge { p });
    }
    let stake = kelly_fraction(game)?;
    let lhs = utility(stake, game).value();
    let rhs = LN_2 - shannon(p, LogBase::Natural)?.h;
    Ok(IdentityCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}
