//! Seeded wealth simulation and the expectation, drift, ruin and Doob
//! results for fixed-fraction betting.
//!
//! Path `k` of a batch draws its outcomes from `Substream(seed, k)` and all
//! reductions run in path order, so a batch is bitwise identical no matter
//! how many threads produced it.

use crate::bernoulli::{sample_outcomes, GameParams, OutcomeSequence, OutcomeStream, Substream};
use crate::error::{KellyError, Result};
use crate::kelly::{classify, utility, BetFraction, Regime, ZERO_TOL};

/// Refuse simulations with more than this many Bernoulli steps.
pub const MAX_SIM_STEPS: u64 = 1_000_000_000;

/// Refuse recordings that would hold more than this many wealth values.
pub const MAX_RECORDED_VALUES: u64 = 50_000_000;

/// A fixed-fraction wager: starting wealth, game, stake and horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wager {
    pub w0: f64,
    pub game: GameParams,
    pub stake: BetFraction,
    pub trials: u64,
}

impl Wager {
    pub fn new(w0: f64, game: GameParams, stake: BetFraction, trials: u64) -> Result<Self> {
        if !(w0 > 0.0 && w0.is_finite()) {
            return Err(KellyError::Domain {
                name: "w0",
                value: w0,
                expected: "a positive finite initial wealth",
            });
        }
        if trials == 0 {
            return Err(KellyError::Domain {
                name: "N",
                value: 0.0,
                expected: "at least one trial",
            });
        }
        Ok(Self {
            w0,
            game,
            stake,
            trials,
        })
    }

    /// Same wager stopped after `trials` steps.
    pub fn at(self, trials: u64) -> Self {
        Self { trials, ..self }
    }
}

/// Which wealth values a simulation keeps per path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recording {
    /// Only the listed trial indices (sorted, each `<= N`).
    Checkpoints(Vec<usize>),
    /// Every `W(0..=N)`.
    Full,
}

impl Recording {
    /// `count` evenly spaced checkpoints `round(j N / count)`, `j = 0..=count`.
    pub fn evenly_spaced(trials: usize, count: usize) -> Self {
        let count = count.max(1);
        let mut points: Vec<usize> = (0..=count)
            .map(|j| ((j as f64 * trials as f64) / count as f64).round() as usize)
            .collect();
        points.dedup();
        Recording::Checkpoints(points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub wager: Wager,
    pub paths: usize,
    pub seed: u64,
    pub recording: Recording,
}

impl SimConfig {
    /// A configuration recording `W` at `0, N/4, N/2, 3N/4, N`.
    pub fn new(wager: Wager, paths: usize, seed: u64) -> Result<Self> {
        if paths == 0 {
            return Err(KellyError::Domain {
                name: "paths",
                value: 0.0,
                expected: "at least one path",
            });
        }
        let trials = wager.trials as usize;
        Ok(Self {
            wager,
            paths,
            seed,
            recording: Recording::evenly_spaced(trials, 4),
        })
    }

    pub fn with_recording(mut self, recording: Recording) -> Self {
        self.recording = recording;
        self
    }

    fn checkpoints(&self) -> Result<Vec<usize>> {
        let n = self.wager.trials as usize;
        match &self.recording {
            Recording::Full => Ok((0..=n).collect()),
            Recording::Checkpoints(points) => {
                let sorted = points.windows(2).all(|w| w[0] < w[1]);
                match points.last() {
                    Some(&last) if sorted && last <= n => Ok(points.clone()),
                    _ => Err(KellyError::Domain {
                        name: "checkpoints",
                        value: points.last().copied().unwrap_or(0) as f64,
                        expected: "a non-empty strictly increasing list of trials <= N",
                    }),
                }
            }
        }
    }
}

/// Simulated wealth paths.
///
/// Wealth is kept at the recorded checkpoints only; the underlying
/// outcomes of any path can be regenerated from its substream.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBatch {
    config: SimConfig,
    checkpoints: Vec<usize>,
    wealth: Vec<f64>,
    max_at: Vec<f64>,
    wins: Vec<u64>,
    final_wealth: Vec<f64>,
    running_max: Vec<f64>,
    ruined: Vec<bool>,
}

struct PathRecord {
    wealth: Vec<f64>,
    max_at: Vec<f64>,
    wins: u64,
    final_wealth: f64,
    running_max: f64,
}

fn run_path(wager: &Wager, seed: u64, index: u64, checkpoints: &[usize]) -> PathRecord {
    let f = wager.stake.get();
    let (up, down) = (1.0 + f, 1.0 - f);
    let mut draws = OutcomeStream::new(wager.game, Substream::new(seed, index));
    let mut wealth = Vec::with_capacity(checkpoints.len());
    let mut max_at = Vec::with_capacity(checkpoints.len());
    let mut w = wager.w0;
    let mut max = w;
    let mut wins = 0u64;
    let mut next = 0;
    if checkpoints[0] == 0 {
        wealth.push(w);
        max_at.push(max);
        next = 1;
    }
    for trial in 1..=wager.trials as usize {
        if draws.next_win() {
            w *= up;
            wins += 1;
        } else {
            w *= down;
        }
        if w > max {
            max = w;
        }
        if next < checkpoints.len() && checkpoints[next] == trial {
            wealth.push(w);
            max_at.push(max);
            next += 1;
        }
    }
    PathRecord {
        wealth,
        max_at,
        wins,
        final_wealth: w,
        running_max: max,
    }
}

fn check_size(config: &SimConfig, checkpoints: usize) -> Result<()> {
    let steps = (config.paths as u64).saturating_mul(config.wager.trials);
    if steps > MAX_SIM_STEPS {
        return Err(KellyError::Size {
            what: "simulation steps (paths x N)",
            requested: steps,
            limit: MAX_SIM_STEPS,
        });
    }
    let values = (config.paths as u64).saturating_mul(checkpoints as u64);
    if values > MAX_RECORDED_VALUES {
        return Err(KellyError::Size {
            what: "recorded wealth values (paths x checkpoints)",
            requested: values,
            limit: MAX_RECORDED_VALUES,
        });
    }
    Ok(())
}

/// Runs the batch on the global thread pool (or sequentially without the
/// `parallel` feature).
pub fn simulate(config: &SimConfig) -> Result<TrajectoryBatch> {
    let checkpoints = config.checkpoints()?;
    check_size(config, checkpoints.len())?;
    let records = run_paths(config, &checkpoints);
    Ok(assemble(config.clone(), checkpoints, records))
}

/// Runs the batch on a dedicated pool of `threads` workers.
#[cfg(feature = "parallel")]
pub fn simulate_with_threads(config: &SimConfig, threads: usize) -> Result<TrajectoryBatch> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|_| KellyError::Domain {
            name: "threads",
            value: threads as f64,
            expected: "a thread count the OS can provide",
        })?;
    pool.install(|| simulate(config))
}

#[cfg(feature = "parallel")]
fn run_paths(config: &SimConfig, checkpoints: &[usize]) -> Vec<PathRecord> {
    use rayon::prelude::*;
    (0..config.paths as u64)
        .into_par_iter()
        .map(|k| run_path(&config.wager, config.seed, k, checkpoints))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_paths(config: &SimConfig, checkpoints: &[usize]) -> Vec<PathRecord> {
    (0..config.paths as u64)
        .map(|k| run_path(&config.wager, config.seed, k, checkpoints))
        .collect()
}

fn assemble(
    config: SimConfig,
    checkpoints: Vec<usize>,
    records: Vec<PathRecord>,
) -> TrajectoryBatch {
    let paths = records.len();
    let width = checkpoints.len();
    let full_stake = config.wager.stake.get() == 1.0;
    let trials = config.wager.trials;
    let mut batch = TrajectoryBatch {
        config,
        checkpoints,
        wealth: Vec::with_capacity(paths * width),
        max_at: Vec::with_capacity(paths * width),
        wins: Vec::with_capacity(paths),
        final_wealth: Vec::with_capacity(paths),
        running_max: Vec::with_capacity(paths),
        ruined: Vec::with_capacity(paths),
    };
    for record in records {
        batch.wealth.extend_from_slice(&record.wealth);
        batch.max_at.extend_from_slice(&record.max_at);
        batch.ruined.push(full_stake && record.wins < trials);
        batch.wins.push(record.wins);
        batch.final_wealth.push(record.final_wealth);
        batch.running_max.push(record.running_max);
    }
    batch
}

impl TrajectoryBatch {
    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn wager(&self) -> &Wager {
        &self.config.wager
    }

    pub fn paths(&self) -> usize {
        self.final_wealth.len()
    }

    pub fn checkpoints(&self) -> &[usize] {
        &self.checkpoints
    }

    /// Recorded `W` of one path, aligned with [`Self::checkpoints`].
    pub fn path_wealth(&self, path: usize) -> &[f64] {
        let w = self.checkpoints.len();
        &self.wealth[path * w..(path + 1) * w]
    }

    /// Running maximum of one path at each checkpoint.
    pub fn path_running_max(&self, path: usize) -> &[f64] {
        let w = self.checkpoints.len();
        &self.max_at[path * w..(path + 1) * w]
    }

    pub fn final_wealth(&self) -> &[f64] {
        &self.final_wealth
    }

    /// `max_{K <= N} W(K)` per path.
    pub fn running_max(&self) -> &[f64] {
        &self.running_max
    }

    pub fn wins(&self) -> &[u64] {
        &self.wins
    }

    /// Paths absorbed at zero (only possible with a full stake).
    pub fn ruined(&self) -> &[bool] {
        &self.ruined
    }

    pub fn ruined_count(&self) -> usize {
        self.ruined.iter().filter(|&&r| r).count()
    }

    /// Regenerates the outcomes of one path from its substream.
    pub fn outcomes(&self, path: usize) -> Result<OutcomeSequence> {
        sample_outcomes(
            self.config.wager.game,
            self.config.wager.trials as usize,
            Substream::new(self.config.seed, path as u64),
        )
    }

    /// `ln(1 + F Z(I))` for one path.
    pub fn log_increments(&self, path: usize) -> Result<Vec<f64>> {
        let f = self.config.wager.stake.get();
        let (up, down) = (f.ln_1p(), (-f).ln_1p());
        Ok(self
            .outcomes(path)?
            .outcomes()
            .iter()
            .map(|&z| if z == 1 { up } else { down })
            .collect())
    }

    /// Per-trial log growth of each surviving path; `None` for ruined paths.
    fn path_drifts(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        let f = self.config.wager.stake.get();
        let n = self.config.wager.trials;
        let (up, down) = (f.ln_1p(), (-f).ln_1p());
        self.wins
            .iter()
            .zip(&self.ruined)
            .map(move |(&wins, &ruined)| {
                if ruined {
                    return None;
                }
                let losses = n - wins;
                let down_total = if losses == 0 {
                    0.0
                } else {
                    losses as f64 * down
                };
                Some((wins as f64 * up + down_total) / n as f64)
            })
    }

    pub fn stats(&self) -> WealthStats {
        let (mean_final, var_final) = mean_var(&self.final_wealth);
        let drifts: Vec<f64> = self.path_drifts().flatten().collect();
        let (mean_log_growth, var_drift) = mean_var(&drifts);
        WealthStats {
            mean_final,
            var_final,
            vol_final: var_final.sqrt(),
            mean_log_growth,
            se_log_growth: (var_drift / drifts.len() as f64).sqrt(),
            ruined_excluded: self.paths() - drifts.len(),
            running_max: self.running_max.clone(),
        }
    }

    fn column(&self, checkpoint: usize) -> impl Iterator<Item = f64> + '_ {
        let w = self.checkpoints.len();
        self.wealth.iter().skip(checkpoint).step_by(w).copied()
    }

    fn max_column(&self, checkpoint: usize) -> impl Iterator<Item = f64> + '_ {
        let w = self.checkpoints.len();
        self.max_at.iter().skip(checkpoint).step_by(w).copied()
    }
}

/// Sample mean and unbiased sample variance, summed in slice order.
pub(crate) fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WealthStats {
    pub mean_final: f64,
    pub var_final: f64,
    pub vol_final: f64,
    /// Estimates `U(F, p)`.
    pub mean_log_growth: f64,
    pub se_log_growth: f64,
    pub ruined_excluded: usize,
    pub running_max: Vec<f64>,
}

/// `w0 (1 + F(2p-1))^N`.
pub fn expected_wealth_linear(wager: &Wager) -> f64 {
    let g = conditional_growth_factor(wager.game, wager.stake);
    wager.w0 * g.powf(wager.trials as f64)
}

/// `w0 (1 + pF)^N (1 - qF)^N`, which treats wins and losses as independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductExpectation {
    pub value: f64,
    /// Always set: the factorisation assumes independent win and loss counts.
    pub assumes_independent_counts: bool,
}

pub fn expected_wealth_product(wager: &Wager) -> ProductExpectation {
    let f = wager.stake.get();
    let (p, q) = (wager.game.p(), wager.game.q());
    let base = (1.0 + p * f) * (1.0 - q * f);
    ProductExpectation {
        value: wager.w0 * base.powf(wager.trials as f64),
        assumes_independent_counts: true,
    }
}

/// Largest stake accepted by [`expected_wealth_exponential`].
pub const EXPONENTIAL_MAX_STAKE: f64 = 0.1;

/// `w0 exp(N F (p - q))`, valid for small stakes.
pub fn expected_wealth_exponential(wager: &Wager) -> Result<f64> {
    let f = wager.stake.get();
    if f > EXPONENTIAL_MAX_STAKE {
        return Err(KellyError::ApproximationDomain {
            name: "F",
            value: f,
            limit: EXPONENTIAL_MAX_STAKE,
        });
    }
    Ok(wager.w0 * (wager.trials as f64 * f * wager.game.edge()).exp())
}

/// `E[W(I+1) | W(I)] / W(I) = 1 + F(2p-1)`.
pub fn conditional_growth_factor(game: GameParams, stake: BetFraction) -> f64 {
    1.0 + stake.get() * game.edge()
}

/// `P(W(N) = 0)` when the whole bankroll is staked every trial: `1 - p^N`.
pub fn ruin_probability_full_stake(game: GameParams, trials: u64) -> f64 {
    -(trials as f64 * game.p().ln()).exp_m1()
}

/// `min(1, E[W(N)] / λ)`, the maximal-inequality bound on `P(sup W >= λ)`.
pub fn doob_bound(wager: &Wager, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok((expected_wealth_linear(wager) / lambda).min(1.0))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 {
        Ok(())
    } else {
        Err(KellyError::Domain {
            name: "lambda",
            value: lambda,
            expected: "a positive wealth level",
        })
    }
}

/// Fraction of paths whose running maximum over the whole horizon reaches `λ`.
pub fn empirical_sup_prob(batch: &TrajectoryBatch, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let hits = batch.running_max.iter().filter(|&&m| m >= lambda).count();
    Ok(hits as f64 / batch.paths() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftCheck {
    pub empirical_drift: f64,
    pub se: f64,
    pub theory: f64,
    pub z_score: f64,
    /// Ruined paths left out because `ln 0` is undefined.
    pub excluded: usize,
}

/// Minimum batch size for [`log_drift_check`].
pub const MIN_DRIFT_PATHS: usize = 100;

/// Compares the mean per-trial log growth of the batch with `U(F, p)`.
pub fn log_drift_check(batch: &TrajectoryBatch) -> Result<DriftCheck> {
    if batch.paths() < MIN_DRIFT_PATHS {
        return Err(KellyError::Domain {
            name: "paths",
            value: batch.paths() as f64,
            expected: "at least 100 paths for a drift check",
        });
    }
    let stats = batch.stats();
    let theory = utility(batch.wager().stake, batch.wager().game).value();
    let diff = stats.mean_log_growth - theory;
    let z_score = if stats.se_log_growth > 0.0 {
        diff / stats.se_log_growth
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    Ok(DriftCheck {
        empirical_drift: stats.mean_log_growth,
        se: stats.se_log_growth,
        theory,
        z_score,
        excluded: stats.ruined_excluded,
    })
}

/// `M(I) = W(I) (1 + F(2p-1))^-I` per path and the drift
/// `A(I) = w0 (1 + F(2p-1))^I - w0`, at the batch checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct DoobDecomposition {
    checkpoints: Vec<usize>,
    martingale: Vec<f64>,
    drift: Vec<f64>,
    w0: f64,
}

impl DoobDecomposition {
    pub fn checkpoints(&self) -> &[usize] {
        &self.checkpoints
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn paths(&self) -> usize {
        self.martingale.len() / self.checkpoints.len()
    }

    pub fn martingale_part(&self, path: usize) -> &[f64] {
        let w = self.checkpoints.len();
        &self.martingale[path * w..(path + 1) * w]
    }

    /// Cross-path mean of `M` at one checkpoint with its standard error.
    pub fn mean_martingale(&self, checkpoint: usize) -> (f64, f64) {
        let w = self.checkpoints.len();
        let column: Vec<f64> = self
            .martingale
            .iter()
            .skip(checkpoint)
            .step_by(w)
            .copied()
            .collect();
        let (mean, var) = mean_var(&column);
        (mean, (var / column.len() as f64).sqrt())
    }

    /// `|mean M(I) - w0| / se` at every checkpoint.
    pub fn flatness_z_scores(&self) -> Vec<f64> {
        (0..self.checkpoints.len())
            .map(|c| {
                let (mean, se) = self.mean_martingale(c);
                if se > 0.0 {
                    (mean - self.w0).abs() / se
                } else if mean == self.w0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .collect()
    }
}

/// Splits a growth-regime batch into its martingale part and drift.
pub fn doob_decompose(batch: &TrajectoryBatch) -> Result<DoobDecomposition> {
    let wager = batch.wager();
    let (game, stake) = (wager.game, wager.stake);
    if game.p() < 0.5 {
        return Err(KellyError::NoEdge { p: game.p() });
    }
    if classify(stake, game, ZERO_TOL).regime == Regime::DecaySupermartingale {
        return Err(KellyError::NotSubmartingale {
            stake: stake.get(),
            p: game.p(),
        });
    }
    let growth = conditional_growth_factor(game, stake);
    if growth == 0.0 {
        return Err(KellyError::Degenerate {
            p: game.p(),
            reason: "one-step growth factor is zero",
        });
    }
    let discounts: Vec<f64> = batch
        .checkpoints
        .iter()
        .map(|&i| growth.powf(-(i as f64)))
        .collect();
    let w = discounts.len();
    let martingale = batch
        .wealth
        .iter()
        .enumerate()
        .map(|(k, &wealth)| wealth * discounts[k % w])
        .collect();
    let drift = batch
        .checkpoints
        .iter()
        .map(|&i| wager.w0 * growth.powf(i as f64) - wager.w0)
        .collect();
    Ok(DoobDecomposition {
        checkpoints: batch.checkpoints.clone(),
        martingale,
        drift,
        w0: wager.w0,
    })
}

/// `E[M(I+1) | M(I)] / M(I) = (p(1+F) + q(1-F)) / (1 + F(2p-1))`.
pub fn one_step_martingale_ratio(game: GameParams, stake: BetFraction) -> f64 {
    let f = stake.get();
    (game.p() * (1.0 + f) + game.q() * (1.0 - f)) / conditional_growth_factor(game, stake)
}

/// Summary statistics of a batch at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointRow {
    pub trial: usize,
    pub mean_wealth: f64,
    pub var_wealth: f64,
    pub mean_martingale: f64,
    pub sup_prob: f64,
    pub doob_bound: f64,
    pub expected_linear: f64,
    pub expected_product: f64,
}

/// One [`CheckpointRow`] per checkpoint, with sup-probabilities at `λ`.
pub fn checkpoint_table(batch: &TrajectoryBatch, lambda: f64) -> Result<Vec<CheckpointRow>> {
    check_lambda(lambda)?;
    let wager = *batch.wager();
    let growth = conditional_growth_factor(wager.game, wager.stake);
    let paths = batch.paths() as f64;
    let mut rows = Vec::with_capacity(batch.checkpoints.len());
    for (c, &trial) in batch.checkpoints.iter().enumerate() {
        let column: Vec<f64> = batch.column(c).collect();
        let (mean_wealth, var_wealth) = mean_var(&column);
        let discount = growth.powf(-(trial as f64));
        let mean_martingale = column.iter().map(|w| w * discount).sum::<f64>() / paths;
        let hits = batch.max_column(c).filter(|&m| m >= lambda).count();
        let horizon = wager.at(trial as u64);
        rows.push(CheckpointRow {
            trial,
            mean_wealth,
            var_wealth,
            mean_martingale,
            sup_prob: hits as f64 / paths,
            doob_bound: (expected_wealth_linear(&horizon) / lambda).min(1.0),
            expected_linear: expected_wealth_linear(&horizon),
            expected_product: expected_wealth_product(&horizon).value,
        });
    }
    Ok(rows)
}
