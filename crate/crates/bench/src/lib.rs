//! Command-line bench for `kelly-core`: CSV tables for the utility, simulation
//! and trade-off experiments, plus the errata verification suite.
//!
//! The binary is a thin wrapper over [`run`], so integration tests can drive
//! every subcommand in-process.

pub mod cli;
pub mod commands;
pub mod config;
pub mod csv;
pub mod errata;

use std::ffi::OsString;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kelly_core::KellyError;

use crate::cli::{parse_fraction, parse_fraction_list, Cli, Command};
use crate::commands::{
    AnalyzeSettings, SimulateSettings, StakeMode, TradeoffSettings, VerifySettings,
};
use crate::config::ConfigFile;
use crate::errata::Scale;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "KELLY_BENCH_OUT";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] KellyError),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl BenchError {
    /// 1 for I/O failures, 2 for anything the caller can fix by changing the
    /// arguments.
    pub fn exit_code(&self) -> u8 {
        match self {
            BenchError::Io { .. } => 1,
            BenchError::Usage(_) | BenchError::Core(_) => 2,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn out_dir(cli: Option<PathBuf>, cfg: &ConfigFile) -> PathBuf {
    cli.or_else(|| cfg.raw("out").map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn required<T>(value: Option<T>, key: &str) -> Result<T, BenchError> {
    value.ok_or_else(|| {
        BenchError::Usage(format!("--{key} is required (flag or config key `{key}`)"))
    })
}

fn config_fraction(cfg: &ConfigFile, key: &str) -> Result<Option<f64>, BenchError> {
    cfg.raw(key)
        .map(|v| {
            parse_fraction(v).map_err(|e| BenchError::Usage(format!("config key `{key}`: {e}")))
        })
        .transpose()
}

fn stake_mode(args: &cli::SimulateArgs, cfg: &ConfigFile) -> Result<StakeMode, BenchError> {
    if args.kelly {
        return Ok(StakeMode::Kelly);
    }
    if let Some(f) = args.fraction {
        return Ok(StakeMode::Fraction(f));
    }
    if let Some(f) = args.stake {
        return Ok(StakeMode::Explicit(f));
    }
    let kelly = cfg.resolve::<bool>(None, "kelly")?.unwrap_or(false);
    let fraction = config_fraction(cfg, "fraction")?;
    let stake = cfg.resolve::<f64>(None, "stake")?;
    match (kelly, fraction, stake) {
        (true, None, None) => Ok(StakeMode::Kelly),
        (false, Some(f), None) => Ok(StakeMode::Fraction(f)),
        (false, None, Some(f)) => Ok(StakeMode::Explicit(f)),
        (false, None, None) => Err(BenchError::Usage(
            "choose a stake with --kelly, --fraction <f> or --stake <F>".into(),
        )),
        _ => Err(BenchError::Usage(
            "config sets more than one of `kelly`, `fraction`, `stake`".into(),
        )),
    }
}

fn dispatch(cli: Cli) -> Result<u8, BenchError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Analyze(a) => {
            let settings = AnalyzeSettings {
                p: required(cfg.resolve(a.p, "p")?, "p")?,
                grid: cfg.resolve(a.grid, "grid")?.unwrap_or(1001),
                root_tol: cfg
                    .resolve(a.root_tol, "root_tol")?
                    .unwrap_or(kelly_core::kelly::ROOT_TOL),
                out: out_dir(a.out, &cfg),
            };
            for path in commands::analyze(&settings)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Simulate(a) => {
            let w0 = cfg.resolve(a.w0, "w0")?.unwrap_or(1000.0);
            let settings = SimulateSettings {
                p: required(cfg.resolve(a.p, "p")?, "p")?,
                mode: stake_mode(&a, &cfg)?,
                n: cfg.resolve(a.n, "n")?.unwrap_or(1000),
                paths: cfg.resolve(a.paths, "paths")?.unwrap_or(10_000),
                w0,
                seed: cfg.resolve(a.seed, "seed")?.unwrap_or(0),
                threads: cfg.resolve(a.threads, "threads")?,
                checkpoints: cfg.resolve(a.checkpoints, "checkpoints")?.unwrap_or(4),
                lambda: cfg.resolve(a.lambda, "lambda")?,
                out: out_dir(a.out, &cfg),
            };
            let report = commands::simulate_cmd(&settings)?;
            println!(
                "stake {} utility {} regime {}",
                report.stake, report.utility, report.regime
            );
            for path in report.files {
                println!("wrote {}", path.display());
            }
        }
        Command::Tradeoff(a) => {
            let f = match a.f {
                Some(f) => f,
                None => match cfg.raw("f") {
                    Some(v) => parse_fraction_list(v)
                        .map_err(|e| BenchError::Usage(format!("config key `f`: {e}")))?,
                    None => vec![2.0 / 3.0, 1.0],
                },
            };
            let settings = TradeoffSettings {
                p: cfg.resolve(a.p, "p")?.unwrap_or(0.52),
                f,
                n: cfg.resolve(a.n, "n")?.unwrap_or(1000),
                w0: cfg.resolve(a.w0, "w0")?.unwrap_or(1000.0),
                steps: cfg.resolve(a.steps, "steps")?.unwrap_or(100),
                out: out_dir(a.out, &cfg),
            };
            for path in commands::tradeoff(&settings)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Verify(a) => {
            let scale = if a.full {
                Scale::Full
            } else if a.quick {
                Scale::Quick
            } else {
                match cfg.raw("scale") {
                    Some(v) => v.parse().map_err(BenchError::Usage)?,
                    None => Scale::Quick,
                }
            };
            let settings = VerifySettings {
                scale,
                seed: cfg.resolve(a.seed, "seed")?.unwrap_or(0),
                out: out_dir(a.out, &cfg),
            };
            let (report, path) = commands::verify(&settings)?;
            for e in &report.entries {
                println!(
                    "{:<10} {:<15} {:<36} claimed {:<12.6e} computed {:<12.6e}{}",
                    e.status(),
                    e.verdict.to_string(),
                    e.id,
                    e.claimed,
                    e.computed,
                    e.note
                        .as_deref()
                        .map(|n| format!("  ({n})"))
                        .unwrap_or_default()
                );
            }
            let regressions = report.regressions().count();
            let mismatches = report
                .entries
                .iter()
                .filter(|e| e.verdict == errata::Verdict::Mismatch)
                .count();
            println!(
                "{} claims, {} documented mismatches, {} regressions; wrote {}",
                report.entries.len(),
                mismatches,
                regressions,
                path.display()
            );
            if regressions > 0 {
                return Ok(1);
            }
        }
    }
    Ok(0)
}
