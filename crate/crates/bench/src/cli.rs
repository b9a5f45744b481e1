use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};

/// Experiments for fixed-fraction betting on a biased coin.
#[derive(Debug, Parser)]
#[command(name = "kelly-bench", version)]
pub struct Cli {
    /// Flat `key = value` file supplying values for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Utility curve, regime partition and entropy tables.
    Analyze(AnalyzeArgs),
    /// Seeded Monte Carlo of wealth paths with martingale diagnostics.
    Simulate(SimulateArgs),
    /// Expected wealth and volatility for fractions of the Kelly stake.
    Tradeoff(TradeoffArgs),
    /// Recompute every registered claim and report matches and errata.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Win probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of stake values on the utility curve.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Residual tolerance for the break-even root.
    #[arg(long)]
    pub root_tol: Option<f64>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").args(["kelly", "fraction", "stake"])))]
pub struct SimulateArgs {
    #[arg(long)]
    pub p: Option<f64>,
    /// Stake the Kelly fraction 2p - 1.
    #[arg(long)]
    pub kelly: bool,
    /// Stake this multiple of the Kelly fraction.
    #[arg(long, value_parser = parse_fraction)]
    pub fraction: Option<f64>,
    /// Stake this fraction of wealth directly.
    #[arg(long)]
    pub stake: Option<f64>,
    /// Trials per path.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub paths: Option<usize>,
    /// Initial wealth.
    #[arg(long)]
    pub w0: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Number of evenly spaced checkpoints after I = 0.
    #[arg(long)]
    pub checkpoints: Option<usize>,
    /// Wealth level for the sup-probability column of the summary.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TradeoffArgs {
    #[arg(long)]
    pub p: Option<f64>,
    /// Kelly multipliers, e.g. `0.5,2/3,1`.
    #[arg(long, value_delimiter = ',', value_parser = parse_fraction)]
    pub f: Option<Vec<f64>>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub w0: Option<f64>,
    /// Horizon points in the curve table.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("scale").args(["quick", "full"])))]
pub struct VerifyArgs {
    /// 10^4 Monte Carlo paths per claim.
    #[arg(long)]
    pub quick: bool,
    /// 10^5 Monte Carlo paths per claim.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// Parses `0.75` or `2/3`.
pub fn parse_fraction(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in `{s}`"))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in `{s}`"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn parse_fraction_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_fraction).collect()
}
