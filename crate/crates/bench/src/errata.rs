//! Registry of claims about the model, each re-evaluated against an independent
//! computation.
//!
//! Claims expected to hold are `match`-class: if one stops matching, the run
//! reports a regression. Claims known to be wrong are `mismatch`-class and are
//! reported without failing the run.

use std::f64::consts::LN_2;
use std::fmt;

use kelly_core::bernoulli::{
    covariance_uv, mgf, mgf_bruteforce, net_wins_variance, pmf_normalization, CovarianceModel,
};
use kelly_core::entropy::{
    binomial_entropy, binomial_entropy_three_sum, binomial_entropy_three_sum_alpha_weighted,
    shannon, utility_entropy_identity, LogBase,
};
use kelly_core::enumeration::{expectation, expected_wealth, wealth_mean_variance};
use kelly_core::kelly::{utility_curve, utility_derivatives, ROOT_TOL};
use kelly_core::martingale::{
    conditional_growth_factor, doob_bound, doob_decompose, empirical_sup_prob,
    expected_wealth_exponential, expected_wealth_linear, expected_wealth_product, log_drift_check,
    one_step_martingale_ratio, ruin_probability_full_stake,
};
use kelly_core::risk::{
    fractional_plan, variance_report, wealth_approx, wealth_exact, wealth_variance_exact,
    ExpansionOrder,
};
use kelly_core::{
    f_star, f_star_approx, kelly_fraction, simulate, utility, BetFraction, BinomialSpec,
    GameParams, KellyError, Recording, SimConfig, TrajectoryBatch, TrialCounts, Wager,
};

use crate::csv::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    pub fn paths(self) -> usize {
        match self {
            Scale::Quick => 10_000,
            Scale::Full => 100_000,
        }
    }
}

impl std::str::FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Scale::Quick),
            "full" => Ok(Scale::Full),
            _ => Err(format!("scale must be `quick` or `full`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "match",
            Verdict::Mismatch => "mismatch",
            Verdict::NotApplicable => "not-applicable",
        })
    }
}

/// How `computed` is judged against `claimed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// Relative gap at most the tolerance; absolute when the claim is zero.
    Relative(f64),
    /// `|computed - claimed|` at most the tolerance.
    Absolute(f64),
    /// Within `k` standard errors.
    Sigma { se: f64, k: f64 },
    /// `computed <= claimed`.
    AtMost,
    /// `computed >= claimed`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub id: &'static str,
    pub location: &'static str,
    pub claimed: f64,
    pub computed: f64,
    pub relative_gap: f64,
    pub verdict: Verdict,
    pub expected: Verdict,
    /// Error text when the computation could not be carried out.
    pub note: Option<String>,
}

impl Entry {
    pub fn is_regression(&self) -> bool {
        self.expected == Verdict::Match && self.verdict != Verdict::Match
    }

    pub fn status(&self) -> &'static str {
        if self.verdict == self.expected {
            "ok"
        } else if self.is_regression() {
            "REGRESSION"
        } else {
            "changed"
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrataReport {
    pub scale: Scale,
    pub seed: u64,
    pub entries: Vec<Entry>,
}

impl ErrataReport {
    pub fn regressions(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.is_regression())
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "claim",
            "location",
            "claimed",
            "computed",
            "relative_gap",
            "verdict",
            "expected",
            "status",
        ]);
        for e in &self.entries {
            t.push(vec![
                e.id.to_owned(),
                e.location.to_owned(),
                num(e.claimed),
                num(e.computed),
                num(e.relative_gap),
                e.verdict.to_string(),
                e.expected.to_string(),
                e.status().to_owned(),
            ]);
        }
        t
    }
}

fn relative_gap(claimed: f64, computed: f64) -> f64 {
    if claimed == computed {
        0.0
    } else if claimed == 0.0 {
        (computed - claimed).abs()
    } else {
        ((computed - claimed) / claimed).abs()
    }
}

fn judge(claimed: f64, computed: f64, rule: Rule) -> Verdict {
    if claimed.is_nan() || computed.is_nan() {
        return Verdict::NotApplicable;
    }
    let gap = (computed - claimed).abs();
    let gap = if gap.is_nan() { 0.0 } else { gap };
    let ok = match rule {
        Rule::Relative(tol) => relative_gap(claimed, computed) <= tol,
        Rule::Absolute(tol) => claimed == computed || gap <= tol,
        Rule::Sigma { se, k } => claimed == computed || gap <= k * se,
        Rule::AtMost => computed <= claimed,
        Rule::AtLeast => computed >= claimed,
    };
    if ok {
        Verdict::Match
    } else {
        Verdict::Mismatch
    }
}

/// Outcome of one evaluation: `(claimed, computed, rule)`.
type Evaluation = Result<(f64, f64, Rule), KellyError>;

struct Registry {
    entries: Vec<Entry>,
}

impl Registry {
    fn claim(
        &mut self,
        id: &'static str,
        location: &'static str,
        expected: Verdict,
        eval: Evaluation,
    ) {
        let entry = match eval {
            Ok((claimed, computed, rule)) => Entry {
                id,
                location,
                claimed,
                computed,
                relative_gap: relative_gap(claimed, computed),
                verdict: judge(claimed, computed, rule),
                expected,
                note: None,
            },
            Err(e) => Entry {
                id,
                location,
                claimed: f64::NAN,
                computed: f64::NAN,
                relative_gap: f64::NAN,
                verdict: Verdict::NotApplicable,
                expected,
                note: Some(e.to_string()),
            },
        };
        debug_assert!(
            self.entries.iter().all(|e| e.id != id),
            "duplicate claim {id}"
        );
        self.entries.push(entry);
    }
}

fn game(p: f64) -> GameParams {
    GameParams::new(p).expect("registry probabilities are valid")
}

fn stake(f: f64) -> BetFraction {
    BetFraction::new(f).expect("registry stakes are valid")
}

fn batch(
    w0: f64,
    p: f64,
    f: f64,
    n: u64,
    paths: usize,
    seed: u64,
    checkpoints: usize,
) -> Result<TrajectoryBatch, KellyError> {
    let wager = Wager::new(w0, GameParams::new(p)?, BetFraction::new(f)?, n)?;
    let config = SimConfig::new(wager, paths, seed)?
        .with_recording(Recording::evenly_spaced(n as usize, checkpoints));
    simulate(&config)
}

/// Mean log-growth against `U(F, p)`.
fn drift(p: f64, f: f64, paths: usize, seed: u64) -> Evaluation {
    let check = log_drift_check(&batch(1.0, p, f, 1000, paths, seed, 1)?)?;
    Ok((
        check.theory,
        check.empirical_drift,
        Rule::Sigma {
            se: check.se,
            k: 3.0,
        },
    ))
}

/// Empirical ruin frequency at full stake against `1 - p^N`.
fn ruin(p: f64, n: u64, paths: usize, seed: u64) -> Evaluation {
    let b = batch(1.0, p, 1.0, n, paths, seed, 1)?;
    let law = ruin_probability_full_stake(GameParams::new(p)?, n);
    let freq = b.ruined_count() as f64 / paths as f64;
    let se = (law * (1.0 - law) / paths as f64).sqrt();
    Ok((law, freq, Rule::Sigma { se, k: 3.0 }))
}

/// Runs every claim in the registry, in a fixed order.
pub fn run(scale: Scale, seed: u64) -> Result<ErrataReport, KellyError> {
    use Verdict::{Match, Mismatch};
    let paths = scale.paths();
    let mut r = Registry {
        entries: Vec::new(),
    };

    // Binomial counts.
    r.claim(
        "binomial_normalization",
        "binomial law, total probability",
        Match,
        (|| {
            Ok((
                1.0,
                pmf_normalization(BinomialSpec::new(1000, 0.52)?)?,
                Rule::Absolute(1e-12),
            ))
        })(),
    );
    r.claim(
        "binomial_mean",
        "binomial law, mean Np",
        Match,
        (|| {
            let computed = expectation(BinomialSpec::new(1000, 0.52)?, |a| a as f64)?;
            Ok((1000.0 * 0.52, computed, Rule::Relative(1e-12)))
        })(),
    );
    r.claim(
        "binomial_variance",
        "binomial law, variance Np(1-p)",
        Match,
        (|| {
            let spec = BinomialSpec::new(1000, 0.52)?;
            let mean = expectation(spec, |a| a as f64)?;
            let computed = expectation(spec, |a| (a as f64 - mean).powi(2))?;
            Ok((1000.0 * 0.52 * 0.48, computed, Rule::Relative(1e-10)))
        })(),
    );
    r.claim(
        "covariance_uv",
        "binomial law, covariance of wins and losses taken as zero",
        Mismatch,
        (|| {
            let claimed = covariance_uv(10, 0.5, CovarianceModel::Independent)?;
            let computed = covariance_uv(10, 0.5, CovarianceModel::Complementary)?;
            Ok((claimed, computed, Rule::Absolute(1e-12)))
        })(),
    );
    r.claim(
        "net_wins_variance",
        "binomial law, VAR(U-V) = 2Np(1-p)",
        Mismatch,
        (|| {
            let claimed = net_wins_variance(10, 0.5, CovarianceModel::Independent)?;
            let computed = net_wins_variance(10, 0.5, CovarianceModel::Complementary)?;
            Ok((claimed, computed, Rule::Relative(1e-12)))
        })(),
    );
    r.claim(
        "mgf_closed_form",
        "binomial moment generating function",
        Match,
        (|| {
            let spec = BinomialSpec::new(20, 0.52)?;
            Ok((
                mgf(spec, 0.3)?,
                mgf_bruteforce(spec, 0.3)?,
                Rule::Relative(1e-12),
            ))
        })(),
    );

    // Entropy.
    r.claim(
        "entropy_maximum",
        "Shannon entropy, maximum log 2 at p = 1/2",
        Match,
        (|| {
            let mut top = f64::NEG_INFINITY;
            for i in 0..=1000 {
                top = top.max(shannon(i as f64 / 1000.0, LogBase::Natural)?.h);
            }
            Ok((LN_2, top, Rule::Relative(1e-15)))
        })(),
    );
    r.claim(
        "entropy_at_certainty",
        "Shannon entropy, zero when p = 1",
        Match,
        (|| Ok((0.0, shannon(1.0, LogBase::Natural)?.h, Rule::Absolute(0.0))))(),
    );
    r.claim(
        "binomial_entropy_expansion_as_stated",
        "binomial entropy, three-sum expansion with ln q weighted by the win count",
        Mismatch,
        (|| {
            let spec = BinomialSpec::new(12, 0.52)?;
            let claimed = binomial_entropy_three_sum_alpha_weighted(spec)?;
            Ok((
                claimed,
                binomial_entropy(spec, LogBase::Natural)?.h,
                Rule::Relative(1e-10),
            ))
        })(),
    );
    r.claim(
        "binomial_entropy_expansion",
        "binomial entropy, three-sum expansion with ln q weighted by the loss count",
        Match,
        (|| {
            let spec = BinomialSpec::new(12, 0.52)?;
            let claimed = binomial_entropy_three_sum(spec)?;
            Ok((
                claimed,
                binomial_entropy(spec, LogBase::Natural)?.h,
                Rule::Relative(1e-10),
            ))
        })(),
    );
    r.claim(
        "entropy_identity",
        "utility at the Kelly stake equals log 2 minus the entropy",
        Match,
        (|| {
            let mut worst: f64 = 0.0;
            for i in 1..=1000 {
                worst = worst.max(utility_entropy_identity(0.5 + 0.5 * i as f64 / 1001.0)?.gap);
            }
            Ok((0.0, worst, Rule::Absolute(1e-12)))
        })(),
    );

    // Utility and the Kelly stake.
    r.claim(
        "kelly_stake",
        "Kelly stake p - q at p = 0.52",
        Match,
        (|| {
            Ok((
                0.04,
                kelly_fraction(GameParams::new(0.52)?)?.get(),
                Rule::Relative(1e-12),
            ))
        })(),
    );
    r.claim(
        "kelly_first_derivative",
        "utility derivative vanishes at the Kelly stake",
        Match,
        (|| {
            let g = GameParams::new(0.52)?;
            Ok((
                0.0,
                utility_derivatives(kelly_fraction(g)?, g).first,
                Rule::Absolute(1e-12),
            ))
        })(),
    );
    r.claim(
        "utility_concave",
        "utility second derivative negative",
        Match,
        (|| {
            let g = GameParams::new(0.52)?;
            let mut worst = f64::NEG_INFINITY;
            for i in 0..1000 {
                worst =
                    worst.max(utility_derivatives(BetFraction::new(i as f64 / 1000.0)?, g).second);
            }
            Ok((0.0, worst, Rule::AtMost))
        })(),
    );
    r.claim(
        "utility_curve_peak",
        "utility curve figure caption, peak at 0.4 for p = 0.6",
        Mismatch,
        (|| {
            let curve = utility_curve(GameParams::new(0.6)?, 10_001)?;
            let (peak, _) = curve
                .iter()
                .fold((0.0, f64::NEG_INFINITY), |best, &(f, u)| {
                    if u.value() > best.1 {
                        (f, u.value())
                    } else {
                        best
                    }
                });
            Ok((0.4, peak, Rule::Absolute(1e-4)))
        })(),
    );
    r.claim(
        "utility_at_full_stake",
        "utility tends to minus infinity as the stake tends to 1",
        Match,
        Ok((
            f64::NEG_INFINITY,
            utility(stake(1.0), game(0.52)).value(),
            Rule::Absolute(0.0),
        )),
    );
    r.claim(
        "utility_sign_structure",
        "utility positive below the break-even stake and negative above",
        Match,
        (|| {
            let g = GameParams::new(0.52)?;
            let root = f_star(g, ROOT_TOL)?.get();
            let mut violations = 0u32;
            for i in 1..10_000 {
                let f = i as f64 / 10_000.0;
                let u = utility(BetFraction::new(f)?, g).value();
                if (f < root && u <= 0.0) || (f > root && u >= 0.0) {
                    violations += 1;
                }
            }
            Ok((0.0, violations as f64, Rule::Absolute(0.0)))
        })(),
    );
    r.claim(
        "utility_dominance",
        "utility increases with p at every stake",
        Match,
        {
            let mut violations = 0u32;
            for j in 0..50 {
                let (lo, hi) = (game(0.5 + j as f64 / 100.0), game(0.51 + j as f64 / 100.0));
                for i in 0..100 {
                    let s = stake(i as f64 / 100.0);
                    if utility(s, hi).value() < utility(s, lo).value() {
                        violations += 1;
                    }
                }
            }
            Ok((0.0, violations as f64, Rule::Absolute(0.0)))
        },
    );

    // Break-even stake.
    r.claim(
        "break_even_residual",
        "break-even stake is a root of the utility",
        Match,
        (|| {
            let g = GameParams::new(0.52)?;
            Ok((
                0.0,
                utility(f_star(g, ROOT_TOL)?, g).value().abs(),
                Rule::Absolute(1e-12),
            ))
        })(),
    );
    r.claim(
        "break_even_epsilon_example",
        "break-even series, worked value 0.0001714 at p = 0.52",
        Match,
        (|| {
            Ok((
                0.0001714,
                f_star_approx(GameParams::new(0.52)?)?.epsilon,
                Rule::Relative(1e-3),
            ))
        })(),
    );
    r.claim(
        "break_even_epsilon_statement",
        "break-even series, correction stated with numerator F_K squared",
        Mismatch,
        (|| {
            let fk: f64 = 0.04;
            let claimed = fk * fk / (0.375 - fk * fk);
            Ok((
                claimed,
                f_star_approx(GameParams::new(0.52)?)?.epsilon,
                Rule::Relative(1e-3),
            ))
        })(),
    );
    r.claim(
        "break_even_series_vs_root",
        "break-even series 2F_K + epsilon improves on 2F_K",
        Mismatch,
        (|| {
            let g = GameParams::new(0.52)?;
            let root = f_star(g, ROOT_TOL)?.get();
            let series = f_star_approx(g)?.approx;
            let leading_gap = (2.0 * kelly_fraction(g)?.get() - root).abs();
            Ok((series, root, Rule::Absolute(leading_gap)))
        })(),
    );

    // Full-stake ruin.
    r.claim(
        "ruin_fifty_trials",
        "full-stake ruin probability 1 - p^N at N = 50",
        Match,
        ruin(0.52, 50, paths, seed),
    );
    r.claim(
        "ruin_five_trials",
        "full-stake ruin probability 1 - p^N at N = 5",
        Match,
        ruin(0.52, 5, paths, seed.wrapping_add(1)),
    );
    r.claim(
        "certain_doubling",
        "full stake with p = 1 doubles wealth every trial",
        Match,
        (|| {
            let b = batch(1.0, 1.0, 1.0, 20, 100, seed, 1)?;
            let worst = b
                .final_wealth()
                .iter()
                .map(|w| (w - 2f64.powi(20)).abs())
                .fold(0.0, f64::max);
            Ok((2f64.powi(20), 2f64.powi(20) + worst, Rule::Absolute(0.0)))
        })(),
    );

    // Regimes.
    r.claim(
        "decay_regime_conditional",
        "wealth a supermartingale above the break-even stake",
        Mismatch,
        (|| {
            Ok((
                1.0,
                conditional_growth_factor(GameParams::new(0.52)?, BetFraction::new(0.2)?),
                Rule::AtMost,
            ))
        })(),
    );
    r.claim(
        "growth_regime_conditional",
        "wealth a submartingale at the Kelly stake",
        Match,
        (|| {
            let g = GameParams::new(0.52)?;
            Ok((
                1.0,
                conditional_growth_factor(g, kelly_fraction(g)?),
                Rule::AtLeast,
            ))
        })(),
    );
    r.claim(
        "drift_growth",
        "log-wealth drift at the Kelly stake",
        Match,
        drift(0.52, 0.04, paths, seed),
    );
    r.claim(
        "drift_break_even",
        "log-wealth drift at the break-even stake",
        Match,
        (|| {
            drift(
                0.52,
                f_star(GameParams::new(0.52)?, ROOT_TOL)?.get(),
                paths,
                seed.wrapping_add(2),
            )
        })(),
    );
    r.claim(
        "drift_decay",
        "log-wealth drift at stake 0.2",
        Match,
        drift(0.52, 0.2, paths, seed.wrapping_add(3)),
    );

    // Expected wealth.
    r.claim(
        "expected_wealth_linear",
        "expected wealth w0 (1 + F(2p-1))^N",
        Match,
        (|| {
            let w = Wager::new(1000.0, GameParams::new(0.52)?, BetFraction::new(0.04)?, 20)?;
            let oracle = expected_wealth(1000.0, 0.04, BinomialSpec::new(20, 0.52)?)?;
            Ok((expected_wealth_linear(&w), oracle, Rule::Relative(1e-10)))
        })(),
    );
    r.claim(
        "expected_wealth_product",
        "expected wealth w0 (1 + pF)^N (1 - qF)^N",
        Mismatch,
        (|| {
            let w = Wager::new(1000.0, GameParams::new(0.52)?, BetFraction::new(0.04)?, 20)?;
            let oracle = expected_wealth(1000.0, 0.04, BinomialSpec::new(20, 0.52)?)?;
            Ok((
                expected_wealth_product(&w).value,
                oracle,
                Rule::Relative(1e-10),
            ))
        })(),
    );
    r.claim(
        "product_cross_term",
        "worked value pqF^2 = 0.00009996 at p = 0.51",
        Match,
        {
            let f = 2.0 * 0.51 - 1.0;
            Ok((0.00009996, 0.51 * 0.49 * f * f, Rule::Relative(1e-12)))
        },
    );
    r.claim(
        "kelly_linear_base",
        "growth base 4p^2 - 4p + 2 at the Kelly stake",
        Match,
        (|| {
            let p: f64 = 0.52;
            let g = GameParams::new(p)?;
            let claimed = 4.0 * p * p - 4.0 * p + 2.0;
            Ok((
                claimed,
                conditional_growth_factor(g, kelly_fraction(g)?),
                Rule::Relative(1e-12),
            ))
        })(),
    );
    r.claim(
        "kelly_product_base",
        "product base 4p^4 - 8p^3 + 9p^2 - 5p + 2 at the Kelly stake",
        Match,
        (|| {
            let p: f64 = 0.52;
            let claimed = 4.0 * p.powi(4) - 8.0 * p.powi(3) + 9.0 * p * p - 5.0 * p + 2.0;
            let f = kelly_fraction(GameParams::new(p)?)?.get();
            Ok((
                claimed,
                (1.0 + p * f) * (1.0 - (1.0 - p) * f),
                Rule::Relative(1e-12),
            ))
        })(),
    );
    r.claim(
        "kelly_product_expectation",
        "expected wealth with the product base at the Kelly stake",
        Mismatch,
        (|| {
            let p: f64 = 0.52;
            let base = 4.0 * p.powi(4) - 8.0 * p.powi(3) + 9.0 * p * p - 5.0 * p + 2.0;
            let oracle = expected_wealth(1000.0, 2.0 * p - 1.0, BinomialSpec::new(1000, p)?)?;
            Ok((1000.0 * base.powi(1000), oracle, Rule::Relative(1e-6)))
        })(),
    );
    r.claim(
        "expected_wealth_exponential",
        "small-stake expected wealth w0 exp(NF(p-q))",
        Match,
        (|| {
            let w = Wager::new(1000.0, GameParams::new(0.52)?, BetFraction::new(0.04)?, 20)?;
            Ok((
                expected_wealth_exponential(&w)?,
                expected_wealth_linear(&w),
                Rule::Relative(1e-3),
            ))
        })(),
    );

    // Maximal inequality and the martingale part.
    let doob_batch = batch(1000.0, 0.52, 0.04, 200, paths, seed.wrapping_add(4), 4);
    r.claim(
        "doob_maximal_inequality",
        "maximal inequality P(sup W >= lambda) <= E[W(N)] / lambda",
        Match,
        (|| {
            let b = doob_batch.as_ref().map_err(Clone::clone)?;
            let mut worst = f64::NEG_INFINITY;
            for j in 0..20 {
                let lambda = 1000.0 * (1.1 + 1.9 * j as f64 / 19.0);
                worst = worst.max(empirical_sup_prob(b, lambda)? - doob_bound(b.wager(), lambda)?);
            }
            Ok((0.0, worst, Rule::AtMost))
        })(),
    );
    r.claim(
        "one_step_martingale_ratio",
        "discounted wealth has one-step ratio 1",
        Match,
        Ok((
            1.0,
            one_step_martingale_ratio(game(0.52), stake(0.04)),
            Rule::Absolute(1e-15),
        )),
    );
    r.claim(
        "martingale_flatness",
        "discounted wealth keeps mean w0 at every checkpoint",
        Match,
        (|| {
            let d = doob_decompose(doob_batch.as_ref().map_err(Clone::clone)?)?;
            let worst = (0..d.checkpoints().len())
                .map(|c| d.mean_martingale(c))
                .max_by(|a, b| {
                    ((a.0 - 1000.0) / a.1)
                        .abs()
                        .total_cmp(&((b.0 - 1000.0) / b.1).abs())
                })
                .expect("at least one checkpoint");
            Ok((
                1000.0,
                worst.0,
                Rule::Sigma {
                    se: worst.1,
                    k: 3.0,
                },
            ))
        })(),
    );
    r.claim(
        "doob_decomposition_pathwise",
        "W(N) = M(N) + A(N) on every path",
        Mismatch,
        (|| {
            let b = doob_batch.as_ref().map_err(Clone::clone)?;
            let d = doob_decompose(b)?;
            let last = d.checkpoints().len() - 1;
            let drift = d.drift()[last];
            let mut worst: f64 = 0.0;
            for k in 0..d.paths() {
                let w = b.path_wealth(k)[last];
                worst = worst.max(((d.martingale_part(k)[last] + drift) - w).abs() / w);
            }
            Ok((0.0, worst, Rule::Absolute(1e-9)))
        })(),
    );
    r.claim(
        "doob_decomposition_in_mean",
        "E[W(N)] = E[M(N)] (1 + F(2p-1))^N",
        Match,
        (|| {
            let b = doob_batch.as_ref().map_err(Clone::clone)?;
            let d = doob_decompose(b)?;
            let last = d.checkpoints().len() - 1;
            let growth = conditional_growth_factor(game(0.52), stake(0.04))
                .powi(d.checkpoints()[last] as i32);
            let (mean, se) = d.mean_martingale(last);
            let exact = expected_wealth_linear(&b.wager().at(d.checkpoints()[last] as u64));
            Ok((
                exact,
                mean * growth,
                Rule::Sigma {
                    se: se * growth,
                    k: 3.0,
                },
            ))
        })(),
    );

    // Wealth expansion in the stake.
    r.claim(
        "expansion_quadratic_coefficient",
        "second-order wealth coefficient (U(U-1) - V(V-1))/2 at U = 12, V = 8",
        Mismatch,
        (|| {
            let counts = TrialCounts::new(12, 8);
            let f = 1e-3;
            let exact = wealth_exact(1.0, f, counts);
            let linear = wealth_approx(1.0, f, counts, ExpansionOrder::Linear)?;
            let claimed = (wealth_approx(1.0, f, counts, ExpansionOrder::QuadraticNoCross)?
                - linear)
                / (f * f);
            let computed = ((exact - linear) / (f * f)).round();
            Ok((claimed, computed, Rule::Absolute(0.5)))
        })(),
    );
    r.claim(
        "expansion_linear_error",
        "linear wealth expansion accurate to order F^2 N^2",
        Match,
        (|| {
            let f = 0.01;
            let mut worst = f64::NEG_INFINITY;
            for u in 0..=20u64 {
                let counts = TrialCounts::new(u, 20 - u);
                let err = (wealth_exact(1.0, f, counts)
                    - wealth_approx(1.0, f, counts, ExpansionOrder::Linear)?)
                .abs();
                worst = worst.max(err / (f * f * 400.0));
            }
            Ok((1.0, worst, Rule::AtMost))
        })(),
    );

    // Variance.
    r.claim(
        "variance_exact_closed_form",
        "exact wealth variance against enumeration",
        Match,
        (|| {
            let w = Wager::new(1000.0, GameParams::new(0.52)?, BetFraction::new(0.04)?, 100)?;
            let (_, oracle) = wealth_mean_variance(1000.0, 0.04, BinomialSpec::new(100, 0.52)?)?;
            Ok((wealth_variance_exact(&w), oracle, Rule::Relative(1e-9)))
        })(),
    );
    r.claim(
        "variance_linearized",
        "wealth variance 2 w0^2 N p(1-p) F^2",
        Mismatch,
        (|| {
            let v = variance_report(1000.0, 100, 0.52, 0.04)?;
            Ok((v.linearized, v.exact, Rule::Relative(0.1)))
        })(),
    );
    r.claim(
        "variance_unit_stake",
        "wealth variance 2 w0^2 N p(1-p) without the stake factor",
        Mismatch,
        (|| {
            let v = variance_report(1000.0, 100, 0.52, 0.04)?;
            Ok((v.linearized_unit_stake, v.exact, Rule::Relative(0.1)))
        })(),
    );

    // Fractional Kelly.
    r.claim(
        "fractional_stake",
        "two-thirds Kelly at p = 0.52 stakes 2/75",
        Match,
        (|| {
            Ok((
                2.0 / 75.0,
                fractional_plan(0.52, 2.0 / 3.0, 1000, 1000.0)?.f_frac,
                Rule::Relative(1e-15),
            ))
        })(),
    );
    r.claim(
        "fractional_example_q",
        "fractional example, q = 1 - p = 0.475 for p = 0.515",
        Mismatch,
        Ok((0.475, 1.0 - 0.515, Rule::Relative(1e-12))),
    );
    r.claim(
        "fractional_example_kelly",
        "fractional example, F_K = 0.03 for p = 0.515",
        Match,
        (|| {
            Ok((
                0.03,
                kelly_fraction(GameParams::new(0.515)?)?.get(),
                Rule::Relative(1e-12),
            ))
        })(),
    );
    r.claim(
        "fractional_growth_cost",
        "fractional Kelly grows more slowly than full Kelly",
        Match,
        (|| {
            let plan = fractional_plan(0.52, 2.0 / 3.0, 1000, 1000.0)?;
            Ok((plan.growth_full, plan.growth_frac, Rule::AtMost))
        })(),
    );
    r.claim(
        "fractional_volatility_gain",
        "fractional Kelly is less volatile than full Kelly",
        Match,
        (|| {
            let plan = fractional_plan(0.52, 2.0 / 3.0, 1000, 1000.0)?;
            Ok((plan.vol_full, plan.vol_frac, Rule::AtMost))
        })(),
    );

    Ok(ErrataReport {
        scale,
        seed,
        entries: r.entries,
    })
}
