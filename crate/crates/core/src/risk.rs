//! Small-stake wealth expansions, variance and volatility estimates set
//! against exact values, and the fractional Kelly trade-off.

use crate::bernoulli::{BinomialSpec, GameParams, TrialCounts};
use crate::enumeration::{wealth_mean_variance, VARIANCE_ORACLE_MAX_TRIALS};
use crate::error::{KellyError, Result};
use crate::kelly::{kelly_fraction, utility, BetFraction};
use crate::martingale::{expected_wealth_linear, Wager};

/// Largest stake accepted by [`wealth_approx`].
pub const EXPANSION_MAX_STAKE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    /// `1 + F(U-V)`.
    Linear,
    /// `1 + F(U-V) + F²((U-V)² - (U+V))/2`, the true second-order term of
    /// `(1+F)^U (1-F)^V`.
    Quadratic,
    /// `1 + F(U-V) + F²(U(U-1) - V(V-1))/2`. Drops the `-UV F²` cross term
    /// and flips the sign of `V(V-1)`, so its error is still `O(F²)`.
    QuadraticNoCross,
}

/// `w0 (1+F)^U (1-F)^V` expanded in `F`.
pub fn wealth_approx(
    w0: f64,
    stake: f64,
    counts: TrialCounts,
    order: ExpansionOrder,
) -> Result<f64> {
    if !(0.0..=EXPANSION_MAX_STAKE).contains(&stake) {
        return Err(KellyError::ApproximationDomain {
            name: "F",
            value: stake,
            limit: EXPANSION_MAX_STAKE,
        });
    }
    let u = counts.wins() as f64;
    let v = counts.losses() as f64;
    let linear = 1.0 + stake * (u - v);
    let factor = match order {
        ExpansionOrder::Linear => linear,
        ExpansionOrder::Quadratic => linear + stake * stake * ((u - v) * (u - v) - (u + v)) / 2.0,
        ExpansionOrder::QuadraticNoCross => {
            linear + stake * stake * (u * (u - 1.0) - v * (v - 1.0)) / 2.0
        }
    };
    Ok(w0 * factor)
}

/// `w0 (1+F)^U (1-F)^V`.
pub fn wealth_exact(w0: f64, stake: f64, counts: TrialCounts) -> f64 {
    let up = (1.0 + stake).powf(counts.wins() as f64);
    if counts.losses() == 0 {
        w0 * up
    } else {
        w0 * up * (1.0 - stake).powf(counts.losses() as f64)
    }
}

/// Exact `Var[W(N)] = w0² [(1 + 2F(p-q) + F²)^N - (1 + F(p-q))^(2N)]`.
///
/// Evaluated as `E[W]² expm1(...)` so small stakes keep their precision.
pub fn wealth_variance_exact(wager: &Wager) -> f64 {
    let f = wager.stake.get();
    let e = wager.game.edge();
    let n = wager.trials as f64;
    let ln_second = (2.0 * f * e + f * f).ln_1p();
    let ln_first = (f * e).ln_1p();
    let mean_sq_ln = 2.0 * n * ln_first;
    let gap = n * ln_second - mean_sq_ln;
    let var = wager.w0 * wager.w0 * mean_sq_ln.exp() * gap.exp_m1();
    var.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceReport {
    /// `2 w0² N p(1-p) F²`.
    pub linearized: f64,
    /// `2 w0² N p(1-p)`, the same estimate with `F²` dropped.
    pub linearized_unit_stake: f64,
    /// Enumeration over the win count; `None` above
    /// [`VARIANCE_ORACLE_MAX_TRIALS`].
    pub oracle_exact: Option<f64>,
    /// Closed-form exact variance, available for any `N`.
    pub exact: f64,
    /// `oracle_exact / linearized`.
    pub ratio: Option<f64>,
}

pub fn variance_report(w0: f64, trials: u64, p: f64, stake: f64) -> Result<VarianceReport> {
    let wager = Wager::new(w0, GameParams::new(p)?, BetFraction::new(stake)?, trials)?;
    let linearized_unit_stake = 2.0 * w0 * w0 * trials as f64 * p * (1.0 - p);
    let linearized = linearized_unit_stake * stake * stake;
    let oracle_exact = if trials <= VARIANCE_ORACLE_MAX_TRIALS {
        Some(wealth_mean_variance(w0, stake, BinomialSpec::new(trials, p)?)?.1)
    } else {
        None
    };
    Ok(VarianceReport {
        linearized,
        linearized_unit_stake,
        oracle_exact,
        exact: wealth_variance_exact(&wager),
        ratio: oracle_exact.map(|o| o / linearized),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolatilityReport {
    pub linearized: f64,
    pub linearized_unit_stake: f64,
    pub oracle: Option<f64>,
    pub exact: f64,
}

pub fn volatility_report(w0: f64, trials: u64, p: f64, stake: f64) -> Result<VolatilityReport> {
    let v = variance_report(w0, trials, p, stake)?;
    Ok(VolatilityReport {
        linearized: v.linearized.sqrt(),
        linearized_unit_stake: v.linearized_unit_stake.sqrt(),
        oracle: v.oracle_exact.map(f64::sqrt),
        exact: v.exact.sqrt(),
    })
}

/// Unbiased sample variance and its large-sample standard error
/// `sqrt((m4 - s⁴) / n)`.
pub fn sample_variance_with_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for v in values {
        let d = (v - mean) * (v - mean);
        m2 += d;
        m4 += d * d;
    }
    let var = m2 / (n - 1.0);
    let pop = m2 / n;
    let se = ((m4 / n - pop * pop) / n).max(0.0).sqrt();
    (var, se)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalKellyPlan {
    pub f: f64,
    pub f_kelly: f64,
    pub f_frac: f64,
    pub growth_full: f64,
    pub growth_frac: f64,
    pub vol_full: f64,
    pub vol_frac: f64,
}

/// Compares staking `f F_K` with full Kelly over `trials` bets from `w0`.
///
/// Volatilities are exact, not the linearised estimate.
pub fn fractional_plan(p: f64, f: f64, trials: u64, w0: f64) -> Result<FractionalKellyPlan> {
    if !(0.5..1.0).contains(&f) {
        return Err(KellyError::Domain {
            name: "f",
            value: f,
            expected: "a Kelly multiplier in [1/2, 1)",
        });
    }
    let game = GameParams::new(p)?;
    if p <= 0.5 {
        return Err(KellyError::NoEdge { p });
    }
    let full = kelly_fraction(game)?;
    let frac = BetFraction::new(f * full.get())?;
    let vol = |stake| {
        Ok::<_, KellyError>(wealth_variance_exact(&Wager::new(w0, game, stake, trials)?).sqrt())
    };
    Ok(FractionalKellyPlan {
        f,
        f_kelly: full.get(),
        f_frac: frac.get(),
        growth_full: utility(full, game).value(),
        growth_frac: utility(frac, game).value(),
        vol_full: vol(full)?,
        vol_frac: vol(frac)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffRow {
    pub f: f64,
    pub stake: f64,
    pub expected_wealth: f64,
    pub volatility: f64,
    pub utility: f64,
}

/// One row per Kelly multiplier; `f = 1` is full Kelly.
pub fn tradeoff_table(p: f64, f_grid: &[f64], trials: u64, w0: f64) -> Result<Vec<TradeoffRow>> {
    let game = GameParams::new(p)?;
    let full = kelly_fraction(game)?.get();
    f_grid
        .iter()
        .map(|&f| {
            if !(f > 0.0 && f <= 1.0) {
                return Err(KellyError::Domain {
                    name: "f",
                    value: f,
                    expected: "a Kelly multiplier in (0, 1]",
                });
            }
            let stake = BetFraction::new(f * full)?;
            let wager = Wager::new(w0, game, stake, trials)?;
            Ok(TradeoffRow {
                f,
                stake: stake.get(),
                expected_wealth: expected_wealth_linear(&wager),
                volatility: wealth_variance_exact(&wager).sqrt(),
                utility: utility(stake, game).value(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(u: u64, v: u64) -> TrialCounts {
        TrialCounts::new(u, v)
    }

    #[test]
    fn expansion_trivia() {
        for order in [
            ExpansionOrder::Linear,
            ExpansionOrder::Quadratic,
            ExpansionOrder::QuadraticNoCross,
        ] {
            assert_eq!(wealth_approx(7.0, 0.0, counts(5, 3), order).unwrap(), 7.0);
            assert!(wealth_approx(7.0, 0.25, counts(5, 3), order).is_err());
        }
        assert_eq!(
            wealth_approx(7.0, 0.1, counts(4, 4), ExpansionOrder::Linear).unwrap(),
            7.0
        );
    }

    #[test]
    fn expansion_example_within_loose_bound() {
        let exact = wealth_exact(1000.0, 0.04, counts(12, 8));
        for order in [
            ExpansionOrder::Linear,
            ExpansionOrder::Quadratic,
            ExpansionOrder::QuadraticNoCross,
        ] {
            let approx = wealth_approx(1000.0, 0.04, counts(12, 8), order).unwrap();
            assert!(((approx - exact) / exact).abs() < 0.04 * 0.04 * 400.0);
        }
    }

    #[test]
    fn quadratic_error_is_cubic() {
        let c = counts(12, 8);
        let err = |f: f64, order| {
            (wealth_approx(1.0, f, c, order).unwrap() - wealth_exact(1.0, f, c)).abs()
        };
        for k in 0..4 {
            let f = 0.04 / 2f64.powi(k);
            let reduction =
                err(f, ExpansionOrder::Quadratic) / err(f / 2.0, ExpansionOrder::Quadratic);
            assert!((8.0 * 0.9..9.0).contains(&reduction), "F={f}: {reduction}");
            let no_cross = err(f, ExpansionOrder::QuadraticNoCross)
                / err(f / 2.0, ExpansionOrder::QuadraticNoCross);
            assert!(no_cross < 4.5, "F={f}: {no_cross}");
        }
    }

    #[test]
    fn variance_trivia() {
        let zero = variance_report(1000.0, 50, 0.52, 0.0).unwrap();
        assert_eq!(zero.linearized, 0.0);
        // The enumerated mean carries the PMF's rounding, nothing more.
        assert!(zero.oracle_exact.unwrap() < 1e-24);
        assert_eq!(zero.exact, 0.0);
        let sure = variance_report(1000.0, 50, 1.0, 0.3).unwrap();
        let mean = 1000.0 * 1.3f64.powi(50);
        assert!(sure.oracle_exact.unwrap() <= 1e-12 * mean * mean);
        assert_eq!(sure.exact, 0.0);
        let long = variance_report(1.0, VARIANCE_ORACLE_MAX_TRIALS + 1, 0.52, 0.04).unwrap();
        assert_eq!((long.oracle_exact, long.ratio), (None, None));
        assert!(long.exact > 0.0);
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for (n, p, f) in [
            (1, 0.52, 0.04),
            (100, 0.52, 0.04),
            (500, 0.6, 0.2),
            (2000, 0.51, 0.01),
        ] {
            let r = variance_report(1000.0, n, p, f).unwrap();
            let oracle = r.oracle_exact.unwrap();
            assert!(
                (r.exact / oracle - 1.0).abs() < 1e-9,
                "N={n}: {} vs {oracle}",
                r.exact
            );
        }
    }

    #[test]
    fn linearized_ratio_at_reference_point() {
        // Var[U - V] is 4Npq rather than 2Npq, and the linear estimate also
        // misses the growth of E[W] over the horizon.
        let r = variance_report(1000.0, 100, 0.52, 0.04).unwrap();
        let ratio = r.ratio.unwrap();
        assert!((ratio - 2.972_807_059_75).abs() < 1e-9, "{ratio}");
    }

    #[test]
    fn homogeneity() {
        let a = volatility_report(1000.0, 200, 0.52, 0.04).unwrap();
        let b = volatility_report(2000.0, 200, 0.52, 0.04).unwrap();
        assert_eq!(b.linearized, 2.0 * a.linearized);
        assert!((b.oracle.unwrap() / a.oracle.unwrap() - 2.0).abs() < 1e-14);
        assert!((b.exact / a.exact - 2.0).abs() < 1e-14);
        assert_eq!(
            volatility_report(1000.0, 200, 0.52, 0.0).unwrap().exact,
            0.0
        );
    }

    #[test]
    fn fractional_reference_plan() {
        let plan = fractional_plan(0.52, 2.0 / 3.0, 1000, 1000.0).unwrap();
        assert!((plan.f_frac - 2.0 / 75.0).abs() <= 4.0 * f64::EPSILON * (2.0 / 75.0));
        assert!(plan.growth_frac < plan.growth_full);
        assert!(plan.vol_frac < plan.vol_full);
        assert!(fractional_plan(0.52, 1.0, 1000, 1000.0).is_err());
        assert!(fractional_plan(0.52, 0.4, 1000, 1000.0).is_err());
        assert!(matches!(
            fractional_plan(0.5, 0.75, 10, 1.0),
            Err(KellyError::NoEdge { .. })
        ));
        let near = fractional_plan(0.52, 1.0 - 1e-9, 1000, 1000.0).unwrap();
        assert!((near.growth_full - near.growth_frac).abs() < 1e-15);
    }

    #[test]
    fn tradeoff_rows() {
        let rows = tradeoff_table(0.52, &[0.5, 2.0 / 3.0, 0.75, 1.0], 1000, 1000.0).unwrap();
        assert_eq!(rows.len(), 4);
        for pair in rows.windows(2) {
            assert!(pair[0].expected_wealth < pair[1].expected_wealth);
            assert!(pair[0].volatility < pair[1].volatility);
        }
        let full = rows[3];
        assert_eq!(
            full.stake,
            kelly_fraction(GameParams::new(0.52).unwrap())
                .unwrap()
                .get()
        );
        assert!(tradeoff_table(0.52, &[1.5], 10, 1.0).is_err());
    }

    #[test]
    fn variance_se_of_constant_sample() {
        assert_eq!(sample_variance_with_se(&[3.0; 10]), (0.0, 0.0));
    }
}
