//! The log-growth utility `U(F, p) = p ln(1+F) + q ln(1-F)`, its Kelly
//! maximiser, the break-even stake `F*`, and the sign regimes of `[0, 1]`.

use crate::bernoulli::GameParams;
use crate::error::{KellyError, Result};

/// Evaluations at `F >= 1 - NEAR_ONE` report [`UtilityValue::NegInfinity`].
pub const NEAR_ONE: f64 = 1e-12;

/// Default tolerance for `|U(F*, p)|`.
pub const ROOT_TOL: f64 = 1e-12;

/// Default half-width of the break-even band used by [`classify`].
pub const ZERO_TOL: f64 = 1e-10;

const MAX_BISECTIONS: usize = 200;

/// Fraction of current wealth wagered on each trial, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BetFraction(f64);

impl BetFraction {
    pub fn new(stake: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&stake) {
            Ok(Self(stake))
        } else {
            Err(KellyError::Domain {
                name: "F",
                value: stake,
                expected: "a bet fraction in [0, 1]",
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A utility value, with ruin at `F = 1` kept as an explicit variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityValue {
    Finite(f64),
    NegInfinity,
}

impl UtilityValue {
    pub fn value(self) -> f64 {
        match self {
            UtilityValue::Finite(u) => u,
            UtilityValue::NegInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            UtilityValue::Finite(u) => Some(u),
            UtilityValue::NegInfinity => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub first: f64,
    pub second: f64,
}

/// Break-even stake from the small-stake series, `2 F_K + ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRoot {
    pub approx: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimePartition {
    pub p: f64,
    pub f_kelly: BetFraction,
    pub f_star: BetFraction,
    pub f_star_approx: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    GrowthSubmartingale,
    BreakEvenMartingale,
    DecaySupermartingale,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeLabel {
    pub regime: Regime,
    pub utility: UtilityValue,
}

/// `U(F, p)`, with `0 · ln 0 = 0` so that `U(1, 1) = ln 2`.
pub fn utility(stake: BetFraction, game: GameParams) -> UtilityValue {
    let f = stake.get();
    let (p, q) = (game.p(), game.q());
    let win = if p == 0.0 { 0.0 } else { p * f.ln_1p() };
    if q == 0.0 {
        return UtilityValue::Finite(win);
    }
    if f >= 1.0 - NEAR_ONE {
        return UtilityValue::NegInfinity;
    }
    UtilityValue::Finite(win + q * (-f).ln_1p())
}

/// First and second derivative of `U` in `F`.
pub fn utility_derivatives(stake: BetFraction, game: GameParams) -> Derivatives {
    let f = stake.get();
    let (p, q) = (game.p(), game.q());
    let (up, down) = (1.0 + f, 1.0 - f);
    Derivatives {
        first: p / up - q / down,
        second: -p / (up * up) - q / (down * down),
    }
}

/// The Kelly stake `F_K = p - q`.
pub fn kelly_fraction(game: GameParams) -> Result<BetFraction> {
    if game.p() < 0.5 {
        return Err(KellyError::NoEdge { p: game.p() });
    }
    BetFraction::new(game.edge())
}

/// Nonzero root of `U(F, p) = 0`, located by bisection on
/// `[F_K + NEAR_ONE, 1 - NEAR_ONE]`.
///
/// Bisection continues until the bracket stops shrinking, because close to
/// `p = 1/2` the whole bracket sits inside `|U| <= tol`.
pub fn f_star(game: GameParams, tol: f64) -> Result<BetFraction> {
    let p = game.p();
    if p <= 0.5 {
        return Err(KellyError::NoEdge { p });
    }
    if p >= 1.0 {
        return Err(KellyError::Degenerate {
            p,
            reason: "U > 0 on all of [0, 1), so there is no break-even stake",
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(KellyError::Domain {
            name: "tol",
            value: tol,
            expected: "a positive tolerance",
        });
    }
    // The finite formula, so that the sentinel at 1 - δ does not mask a
    // positive endpoint.
    let q = game.q();
    let u = |f: f64| p * f.ln_1p() + q * (-f).ln_1p();
    let mut lo = game.edge() + NEAR_ONE;
    let mut hi = 1.0 - NEAR_ONE;
    if u(hi).is_nan() || u(hi) >= 0.0 {
        return Err(KellyError::Degenerate {
            p,
            reason: "break-even stake lies within 1e-12 of F = 1",
        });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = u(mid);
        if value == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if value > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = if u(lo).abs() <= u(hi).abs() { lo } else { hi };
    let residual = u(root).abs();
    if residual > tol {
        return Err(KellyError::Domain {
            name: "tol",
            value: tol,
            expected: "a tolerance above the attainable residual of the root",
        });
    }
    BetFraction::new(root)
}

/// Series estimate `F* ≈ 2 F_K + ε` with `ε = F_K^3 / (3/8 - F_K^2)`.
pub fn f_star_approx(game: GameParams) -> Result<SeriesRoot> {
    let fk = kelly_fraction(game)?.get();
    let kelly_squared = fk * fk;
    if kelly_squared >= 0.375 {
        return Err(KellyError::SeriesInvalid { kelly_squared });
    }
    let epsilon = fk * kelly_squared / (0.375 - kelly_squared);
    Ok(SeriesRoot {
        approx: 2.0 * fk + epsilon,
        epsilon,
    })
}

pub fn regime_partition(game: GameParams) -> Result<RegimePartition> {
    let f_kelly = kelly_fraction(game)?;
    let f_star = f_star(game, ROOT_TOL)?;
    let series = f_star_approx(game)?;
    Ok(RegimePartition {
        p: game.p(),
        f_kelly,
        f_star,
        f_star_approx: series.approx,
        epsilon: series.epsilon,
    })
}

/// Labels a stake by the sign of `U`, i.e. by the drift of `ln W`.
pub fn classify(stake: BetFraction, game: GameParams, zero_tol: f64) -> RegimeLabel {
    let value = utility(stake, game);
    let u = value.value();
    let regime = if u > zero_tol {
        Regime::GrowthSubmartingale
    } else if u < -zero_tol {
        Regime::DecaySupermartingale
    } else {
        Regime::BreakEvenMartingale
    };
    RegimeLabel {
        regime,
        utility: value,
    }
}

/// `U(F, p) - U(F, p̂) = (p - p̂) ln(1+F) + (p̂ - p) ln(1-F)`.
pub fn utility_dominance(stake: BetFraction, game: GameParams, weaker: GameParams) -> Result<f64> {
    let (p, p_hat) = (game.p(), weaker.p());
    if !(p > p_hat && p_hat > 0.5) {
        return Err(KellyError::Domain {
            name: "p_hat",
            value: p_hat,
            expected: "1/2 < p_hat < p",
        });
    }
    let f = stake.get();
    if !(f > 0.0 && f < 1.0) {
        return Err(KellyError::Domain {
            name: "F",
            value: f,
            expected: "a stake in (0, 1)",
        });
    }
    Ok((p - p_hat) * f.ln_1p() + (p_hat - p) * (-f).ln_1p())
}

/// `U` on a uniform grid over `[0, 1 - NEAR_ONE]`.
pub fn utility_curve(game: GameParams, points: usize) -> Result<Vec<(f64, UtilityValue)>> {
    if points < 2 {
        return Err(KellyError::Domain {
            name: "grid_points",
            value: points as f64,
            expected: "at least 2 grid points",
        });
    }
    let top = 1.0 - NEAR_ONE;
    let step = top / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let f = if i == points - 1 {
                top
            } else {
                i as f64 * step
            };
            (f, utility(BetFraction(f), game))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn game(p: f64) -> GameParams {
        GameParams::new(p).unwrap()
    }

    fn stake(f: f64) -> BetFraction {
        BetFraction::new(f).unwrap()
    }

    #[test]
    fn utility_boundaries() {
        assert_eq!(utility(stake(0.0), game(0.52)), UtilityValue::Finite(0.0));
        assert_eq!(utility(stake(1.0), game(0.52)), UtilityValue::NegInfinity);
        assert_eq!(utility(stake(1.0), game(1.0)), UtilityValue::Finite(LN_2));
        assert!(BetFraction::new(1.01).is_err());
        assert!(BetFraction::new(-0.01).is_err());
    }

    #[test]
    fn utility_at_kelly_is_log2_minus_entropy() {
        let (p, q): (f64, f64) = (0.52, 0.48);
        let u = utility(kelly_fraction(game(p)).unwrap(), game(p)).value();
        let expected = LN_2 + p * p.ln() + q * q.ln();
        assert!((u - expected).abs() < 1e-15);
    }

    #[test]
    fn derivatives() {
        let g = game(0.52);
        let d = utility_derivatives(kelly_fraction(g).unwrap(), g);
        assert!(d.first.abs() < 1e-14);
        for i in 0..100 {
            let f = i as f64 / 100.0;
            for p in [0.01, 0.3, 0.5, 0.52, 0.99] {
                assert!(utility_derivatives(stake(f), game(p)).second < 0.0);
            }
        }
        // Central finite difference with step 1e-6.
        for (f, p) in [(0.1, 0.52), (0.3, 0.6), (0.7, 0.9)] {
            let h = 1e-6;
            let fd = (utility(stake(f + h), game(p)).value()
                - utility(stake(f - h), game(p)).value())
                / (2.0 * h);
            let analytic = utility_derivatives(stake(f), game(p)).first;
            assert!((fd - analytic).abs() < 1e-8, "F={f} p={p}");
        }
    }

    #[test]
    fn kelly_fraction_cases() {
        let fk = kelly_fraction(game(0.52)).unwrap().get();
        assert!((fk - 0.04).abs() < 4e-17);
        assert_eq!(kelly_fraction(game(0.5)).unwrap().get(), 0.0);
        assert_eq!(kelly_fraction(game(1.0)).unwrap().get(), 1.0);
        assert!(matches!(
            kelly_fraction(game(0.49)),
            Err(KellyError::NoEdge { .. })
        ));
    }

    #[test]
    fn f_star_at_reference_probabilities() {
        // Break-even roots from 40-digit bisection of p ln(1+F) + q ln(1-F).
        let cases = [
            (0.52, 0.079_914_684_876_672_76),
            (0.6, 0.389_390_683_334_933_93),
            (0.51, 0.039_989_333_902_265_59),
        ];
        for (p, root) in cases {
            let fs = f_star(game(p), ROOT_TOL).unwrap().get();
            assert!((fs - root).abs() < 1e-13, "p={p} got {fs}");
            assert!(utility(stake(fs), game(p)).value().abs() < 1e-12);
        }
        let fs = f_star(game(0.6), ROOT_TOL).unwrap().get();
        assert!(fs > 0.2 && fs < 1.0);
    }

    #[test]
    fn f_star_errors_and_limits() {
        assert!(matches!(
            f_star(game(0.5), ROOT_TOL),
            Err(KellyError::NoEdge { .. })
        ));
        assert!(matches!(
            f_star(game(1.0), ROOT_TOL),
            Err(KellyError::Degenerate { .. })
        ));
        assert!(f_star(game(0.52), 0.0).is_err());
        let near_fair = f_star(game(0.5 + 1e-9), ROOT_TOL).unwrap().get();
        assert!(near_fair < 1e-8);
        assert!(near_fair > 2e-9);
    }

    #[test]
    fn series_root() {
        let s = f_star_approx(game(0.52)).unwrap();
        assert!((s.epsilon - 0.000_171_4).abs() < 1e-7);
        let fair = f_star_approx(game(0.5)).unwrap();
        assert_eq!((fair.approx, fair.epsilon), (0.0, 0.0));
        // The true root sits 2.567e-4 below 2 F_K + ε: the series correction
        // has the wrong sign (the dropped quartic term is the same order).
        let root = f_star(game(0.52), ROOT_TOL).unwrap().get();
        let gap = s.approx - root;
        assert!((gap - 2.567_130_879_764e-4).abs() < 1e-12, "{gap}");
        assert!(gap.abs() < 10.0 * s.epsilon);
        assert!(matches!(
            f_star_approx(game(0.9)),
            Err(KellyError::SeriesInvalid { .. })
        ));
    }

    #[test]
    fn classification() {
        let g = game(0.52);
        let fk = kelly_fraction(g).unwrap();
        assert_eq!(
            classify(fk, g, ZERO_TOL).regime,
            Regime::GrowthSubmartingale
        );
        assert_eq!(
            classify(stake(0.2), g, ZERO_TOL).regime,
            Regime::DecaySupermartingale
        );
        let fs = f_star(g, ROOT_TOL).unwrap();
        assert_eq!(
            classify(fs, g, ZERO_TOL).regime,
            Regime::BreakEvenMartingale
        );
        assert_eq!(
            classify(stake(1.0), g, ZERO_TOL).utility,
            UtilityValue::NegInfinity
        );
    }

    #[test]
    fn dominance() {
        let d = utility_dominance(stake(0.04), game(0.52), game(0.515)).unwrap();
        assert!(d > 0.0);
        let tiny = utility_dominance(stake(1e-9), game(0.52), game(0.515)).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-10);
        let direct =
            utility(stake(0.5), game(0.6)).value() - utility(stake(0.5), game(0.55)).value();
        let d = utility_dominance(stake(0.5), game(0.6), game(0.55)).unwrap();
        assert!((d - direct).abs() < 1e-14);
        assert!(utility_dominance(stake(0.1), game(0.55), game(0.6)).is_err());
        assert!(utility_dominance(stake(0.1), game(0.55), game(0.5)).is_err());
    }

    #[test]
    fn curves() {
        let curve = utility_curve(game(0.6), 1001).unwrap();
        let (argmax, _) = curve
            .iter()
            .max_by(|a, b| a.1.value().total_cmp(&b.1.value()))
            .unwrap();
        let step = (1.0 - NEAR_ONE) / 1000.0;
        assert!((argmax - 0.2).abs() <= step);

        let fair = utility_curve(game(0.5), 101).unwrap();
        assert_eq!(fair[0].1.value(), 0.0);
        assert!(fair.iter().all(|(_, u)| u.value() <= 0.0));

        let three = utility_curve(game(0.52), 3).unwrap();
        assert_eq!(three[0].1, UtilityValue::Finite(0.0));
        assert_eq!(three[2].1, UtilityValue::NegInfinity);
        assert!(utility_curve(game(0.52), 1).is_err());
    }

    #[test]
    fn partition_orders_the_stakes() {
        let part = regime_partition(game(0.52)).unwrap();
        assert!(0.0 < part.f_kelly.get());
        assert!(part.f_kelly < part.f_star);
        assert!(part.f_star.get() < 1.0);
        assert!(regime_partition(game(0.5)).is_err());
    }
}
