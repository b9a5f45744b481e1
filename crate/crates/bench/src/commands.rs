//! The four subcommands, each writing CSV tables into an output directory.

use std::f64::consts::LN_2;
use std::fs;
use std::path::{Path, PathBuf};

use kelly_core::entropy::{shannon, LogBase};
use kelly_core::kelly::{classify, utility_curve, ZERO_TOL};
use kelly_core::martingale::{
    checkpoint_table, doob_bound, empirical_sup_prob, log_drift_check, simulate_with_threads,
};
use kelly_core::risk::{tradeoff_table, wealth_variance_exact};
use kelly_core::{
    f_star, f_star_approx, kelly_fraction, simulate, utility, BetFraction, GameParams, KellyError,
    Recording, SimConfig, Wager,
};

use crate::csv::{num, opt, Table};
use crate::errata::{self, ErrataReport, Scale};
use crate::BenchError;

fn prepare(out: &Path) -> Result<(), BenchError> {
    fs::create_dir_all(out).map_err(|source| BenchError::Io {
        path: out.to_owned(),
        source,
    })
}

fn emit(
    table: &Table,
    out: &Path,
    name: &str,
    written: &mut Vec<PathBuf>,
) -> Result<(), BenchError> {
    let path = out.join(name);
    table.write(&path).map_err(|source| BenchError::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeSettings {
    pub p: f64,
    pub grid: usize,
    pub root_tol: f64,
    pub out: PathBuf,
}

/// Points of the entropy table over `p ∈ [1/2, 1]`.
const ENTROPY_ROWS: usize = 101;

pub fn analyze(s: &AnalyzeSettings) -> Result<Vec<PathBuf>, BenchError> {
    if !(s.p > 0.0 && s.p < 1.0) {
        return Err(BenchError::Usage(format!(
            "--p must lie in (0, 1), got {}",
            s.p
        )));
    }
    let game = GameParams::new(s.p)?;
    prepare(&s.out)?;
    let mut written = Vec::new();

    let mut curve = Table::new(&["F", "U"]);
    for (f, u) in utility_curve(game, s.grid)? {
        curve.push(vec![num(f), num(u.value())]);
    }
    emit(&curve, &s.out, "utility_curve.csv", &mut written)?;

    let mut notes = Vec::new();
    // At p = 1/2 the Kelly stake is zero and there is no break-even root, so
    // the partition is omitted just as for a losing game.
    let f_kelly = if s.p > 0.5 {
        kelly_fraction(game)
            .map_err(|e| notes.push(e.to_string()))
            .ok()
    } else {
        notes.push(KellyError::NoEdge { p: s.p }.to_string());
        None
    };
    let (root, series) = if f_kelly.is_some() {
        let root = f_star(game, s.root_tol)
            .map_err(|e| notes.push(e.to_string()))
            .ok();
        let series = f_star_approx(game)
            .map_err(|e| notes.push(e.to_string()))
            .ok();
        (root, series)
    } else {
        (None, None)
    };
    let mut partition = Table::new(&["p", "F_K", "F_star", "f_star_approx", "epsilon", "note"]);
    partition.push(vec![
        num(s.p),
        opt(f_kelly.map(BetFraction::get)),
        opt(root.map(BetFraction::get)),
        opt(series.map(|r| r.approx)),
        opt(series.map(|r| r.epsilon)),
        notes.join("; "),
    ]);
    emit(&partition, &s.out, "partition.csv", &mut written)?;

    let mut entropy = Table::new(&["p", "H", "log2_minus_H", "U_at_F_K"]);
    for i in 0..ENTROPY_ROWS {
        let p = 0.5 + 0.5 * i as f64 / (ENTROPY_ROWS - 1) as f64;
        let g = GameParams::new(p)?;
        let h = shannon(p, LogBase::Natural)?.h;
        let u = utility(kelly_fraction(g)?, g).value();
        entropy.push(vec![num(p), num(h), num(LN_2 - h), num(u)]);
    }
    emit(&entropy, &s.out, "entropy.csv", &mut written)?;
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StakeMode {
    Kelly,
    /// Multiple of the Kelly stake.
    Fraction(f64),
    /// Stake given directly.
    Explicit(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSettings {
    pub p: f64,
    pub mode: StakeMode,
    pub n: u64,
    pub paths: usize,
    pub w0: f64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub checkpoints: usize,
    pub lambda: Option<f64>,
    pub out: PathBuf,
}

/// Points in the `doob.csv` λ grid, spread over `[1.1 w0, 3 w0]`.
pub const DOOB_GRID: usize = 20;

pub fn resolve_stake(game: GameParams, mode: StakeMode) -> Result<BetFraction, BenchError> {
    Ok(match mode {
        StakeMode::Kelly => kelly_fraction(game)?,
        StakeMode::Fraction(f) => {
            if f.is_nan() || f <= 0.0 {
                return Err(BenchError::Usage(format!(
                    "--fraction must be positive, got {f}"
                )));
            }
            BetFraction::new(f * kelly_fraction(game)?.get())?
        }
        StakeMode::Explicit(f) => BetFraction::new(f)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub files: Vec<PathBuf>,
    pub stake: f64,
    pub utility: f64,
    pub regime: String,
}

pub fn simulate_cmd(s: &SimulateSettings) -> Result<SimulateReport, BenchError> {
    let game = GameParams::new(s.p)?;
    let stake = resolve_stake(game, s.mode)?;
    let wager = Wager::new(s.w0, game, stake, s.n)?;
    if s.checkpoints == 0 {
        return Err(BenchError::Usage("--checkpoints must be at least 1".into()));
    }
    let config = SimConfig::new(wager, s.paths, s.seed)?
        .with_recording(Recording::evenly_spaced(s.n as usize, s.checkpoints));
    let batch = match s.threads {
        Some(0) => return Err(BenchError::Usage("--threads must be at least 1".into())),
        Some(t) => simulate_with_threads(&config, t)?,
        None => simulate(&config)?,
    };
    prepare(&s.out)?;
    let mut files = Vec::new();

    let lambda = s.lambda.unwrap_or(2.0 * s.w0);
    let mut summary = Table::new(&[
        "I",
        "mean_W",
        "var_W",
        "mean_M",
        "empirical_sup_prob",
        "doob_bound",
        "expected_linear",
        "expected_product",
    ]);
    for row in checkpoint_table(&batch, lambda)? {
        summary.push(vec![
            row.trial.to_string(),
            num(row.mean_wealth),
            num(row.var_wealth),
            num(row.mean_martingale),
            num(row.sup_prob),
            num(row.doob_bound),
            num(row.expected_linear),
            num(row.expected_product),
        ]);
    }
    emit(&summary, &s.out, "trajectories_summary.csv", &mut files)?;

    let mut doob = Table::new(&["lambda", "empirical_sup_prob", "doob_bound"]);
    for j in 0..DOOB_GRID {
        let lambda = s.w0 * (1.1 + 1.9 * j as f64 / (DOOB_GRID - 1) as f64);
        doob.push(vec![
            num(lambda),
            num(empirical_sup_prob(&batch, lambda)?),
            num(doob_bound(&wager, lambda)?),
        ]);
    }
    emit(&doob, &s.out, "doob.csv", &mut files)?;

    let label = classify(stake, game, ZERO_TOL);
    let mut drift = Table::new(&["F", "U", "empirical_drift", "se", "z", "excluded", "note"]);
    match log_drift_check(&batch) {
        Ok(d) => drift.push(vec![
            num(stake.get()),
            num(d.theory),
            num(d.empirical_drift),
            num(d.se),
            num(d.z_score),
            d.excluded.to_string(),
            String::new(),
        ]),
        Err(e) => drift.push(vec![
            num(stake.get()),
            num(label.utility.value()),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            e.to_string(),
        ]),
    }
    emit(&drift, &s.out, "drift.csv", &mut files)?;

    Ok(SimulateReport {
        files,
        stake: stake.get(),
        utility: label.utility.value(),
        regime: format!("{:?}", label.regime),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffSettings {
    pub p: f64,
    pub f: Vec<f64>,
    pub n: u64,
    pub w0: f64,
    pub steps: usize,
    pub out: PathBuf,
}

pub fn tradeoff(s: &TradeoffSettings) -> Result<Vec<PathBuf>, BenchError> {
    if s.f.is_empty() {
        return Err(BenchError::Usage(
            "--f needs at least one multiplier".into(),
        ));
    }
    if s.steps == 0 {
        return Err(BenchError::Usage("--steps must be at least 1".into()));
    }
    let rows = tradeoff_table(s.p, &s.f, s.n, s.w0)?;
    prepare(&s.out)?;
    let mut files = Vec::new();

    let mut table = Table::new(&["f", "F", "expected_wealth", "volatility", "utility"]);
    for r in &rows {
        table.push(vec![
            num(r.f),
            num(r.stake),
            num(r.expected_wealth),
            num(r.volatility),
            num(r.utility),
        ]);
    }
    emit(&table, &s.out, "tradeoff.csv", &mut files)?;

    let game = GameParams::new(s.p)?;
    let mut horizons: Vec<u64> = (1..=s.steps)
        .map(|j| ((j as f64 * s.n as f64) / s.steps as f64).round() as u64)
        .filter(|&n| n > 0)
        .collect();
    horizons.dedup();
    let mut curves = Table::new(&["N", "f", "F", "expected_wealth", "volatility"]);
    for r in &rows {
        let stake = BetFraction::new(r.stake)?;
        for &n in &horizons {
            let wager = Wager::new(s.w0, game, stake, n)?;
            curves.push(vec![
                n.to_string(),
                num(r.f),
                num(r.stake),
                num(kelly_core::martingale::expected_wealth_linear(&wager)),
                num(wealth_variance_exact(&wager).sqrt()),
            ]);
        }
    }
    emit(&curves, &s.out, "tradeoff_curves.csv", &mut files)?;
    Ok(files)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub scale: Scale,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn verify(s: &VerifySettings) -> Result<(ErrataReport, PathBuf), BenchError> {
    let report = errata::run(s.scale, s.seed)?;
    prepare(&s.out)?;
    let path = s.out.join("errata.csv");
    report
        .table()
        .write(&path)
        .map_err(|source| BenchError::Io {
            path: path.clone(),
            source,
        })?;
    Ok((report, path))
}
