use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kelly_core::{utility, BetFraction, GameParams};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kelly-bench"))
        .args(args)
        .env_remove(kelly_bench::OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Rows of a CSV file as string fields, header excluded.
fn rows(path: &Path) -> Vec<Vec<String>> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_owned()
}

fn column(path: &Path, index: usize) -> Vec<f64> {
    rows(path)
        .iter()
        .map(|r| r[index].parse().unwrap())
        .collect()
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&bench(&[])), 2);
    assert_eq!(code(&bench(&["analyze"])), 2);
    assert_eq!(code(&bench(&["analyze", "--p", "1.5"])), 2);
    assert_eq!(code(&bench(&["simulate", "--p", "0.52"])), 2);
    assert_eq!(
        code(&bench(&[
            "simulate", "--p", "0.52", "--kelly", "--stake", "0.1"
        ])),
        2
    );
    assert_eq!(code(&bench(&["verify", "--quick", "--full"])), 2);
    assert_eq!(code(&bench(&["tradeoff", "--f", "0"])), 2);
}

#[test]
fn analyze_writes_partition_with_a_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&bench(&["analyze", "--p", "0.6", "--out", out])), 0);
    let partition = dir.path().join("partition.csv");
    assert_eq!(
        header(&partition),
        "p,F_K,F_star,f_star_approx,epsilon,note"
    );
    let row = &rows(&partition)[0];
    let root: f64 = row[2].parse().unwrap();
    let game = GameParams::new(0.6).unwrap();
    assert!(utility(BetFraction::new(root).unwrap(), game).value().abs() < 1e-12);
    assert_eq!(row[1].parse::<f64>().unwrap(), 2.0 * 0.6 - 1.0);

    let curve = column(&dir.path().join("utility_curve.csv"), 1);
    assert_eq!(curve.len(), 1001);
    assert_eq!(*curve.last().unwrap(), f64::NEG_INFINITY);
    assert_eq!(
        header(&dir.path().join("entropy.csv")),
        "p,H,log2_minus_H,U_at_F_K"
    );
}

#[test]
fn analyze_without_edge_keeps_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        code(&bench(&[
            "analyze", "--p", "0.5", "--grid", "101", "--out", out
        ])),
        0
    );
    let row = &rows(&dir.path().join("partition.csv"))[0];
    assert!(row[1].is_empty() && row[2].is_empty());
    assert!(row[5].contains("0.5"), "{row:?}");
    let file = dir.path().join("utility_curve.csv");
    let u = column(&file, 1);
    let top = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(top, 0.0);
    assert_eq!(u[0], 0.0);
}

#[test]
fn config_file_supplies_and_cli_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("from_cfg");
    fs::write(
        &cfg,
        format!(
            "# tradeoff run\np = 0.52\nf = 1/2, 1\nn = 200\nsteps = 4\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let cfg_arg = cfg.to_str().unwrap();
    assert_eq!(code(&bench(&["--config", cfg_arg, "tradeoff"])), 0);
    let table = rows(&out.join("tradeoff.csv"));
    assert_eq!(table.len(), 2);
    assert_eq!(table[0][0].parse::<f64>().unwrap(), 0.5);
    assert_eq!(rows(&out.join("tradeoff_curves.csv")).len(), 8);

    let over = dir.path().join("from_cli");
    let over_arg = over.to_str().unwrap();
    assert_eq!(
        code(&bench(&[
            "--config", cfg_arg, "tradeoff", "--f", "1", "--out", over_arg
        ])),
        0
    );
    assert_eq!(rows(&over.join("tradeoff.csv")).len(), 1);
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "p = 0.52\ncolour = blue\n").unwrap();
    let out = bench(&["--config", cfg.to_str().unwrap(), "analyze"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    assert_eq!(
        code(&bench(&["--config", "/nonexistent/run.cfg", "analyze"])),
        2
    );
}

#[test]
fn out_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_kelly-bench"))
        .args(["tradeoff", "--n", "10", "--steps", "2"])
        .env(kelly_bench::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&status), 0);
    assert!(dir.path().join("tradeoff.csv").exists());
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    assert_eq!(
        code(&bench(&[
            "tradeoff",
            "--n",
            "10",
            "--out",
            out.to_str().unwrap()
        ])),
        1
    );
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec![
            "simulate", "--p", "0.52", "--kelly", "--n", "300", "--paths", "2000", "--seed", "7",
        ];
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out", out.to_str().unwrap()]);
        assert_eq!(code(&bench(&args)), 0);
        ["trajectories_summary.csv", "doob.csv", "drift.csv"]
            .map(|f| fs::read(out.join(f)).unwrap())
    };
    let a = run("a", &[]);
    assert_eq!(a, run("b", &[]));
    assert_eq!(a, run("t1", &["--threads", "1"]));
    assert_eq!(a, run("t3", &["--threads", "3"]));
}

#[test]
fn simulate_tables_have_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "simulate", "--p", "0.52", "--kelly", "--n", "1000", "--paths", "5000", "--out", out,
    ];
    assert_eq!(code(&bench(&args)), 0);
    let summary = dir.path().join("trajectories_summary.csv");
    assert_eq!(
        header(&summary),
        "I,mean_W,var_W,mean_M,empirical_sup_prob,doob_bound,expected_linear,expected_product"
    );
    let mean = column(&summary, 1);
    assert_eq!(mean.len(), 5);
    assert!(mean.windows(2).all(|w| w[0] < w[1]), "{mean:?}");
    let doob = rows(&dir.path().join("doob.csv"));
    assert_eq!(doob.len(), 20);
    for r in &doob {
        assert!(r[1].parse::<f64>().unwrap() <= r[2].parse::<f64>().unwrap());
    }
    assert_eq!(
        header(&dir.path().join("drift.csv")),
        "F,U,empirical_drift,se,z,excluded,note"
    );
}

#[test]
fn product_column_decreases_at_large_stake() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "simulate", "--p", "0.52", "--stake", "0.2", "--n", "500", "--paths", "500", "--out", out,
    ];
    assert_eq!(code(&bench(&args)), 0);
    let summary = dir.path().join("trajectories_summary.csv");
    let product = column(&summary, 7);
    let linear = column(&summary, 6);
    assert!(product.windows(2).all(|w| w[1] < w[0]), "{product:?}");
    assert!(linear.windows(2).all(|w| w[1] > w[0]), "{linear:?}");
    let drift = rows(&dir.path().join("drift.csv"));
    assert!(drift[0][2].parse::<f64>().unwrap() < 0.0);
}

#[test]
fn fraction_mode_accepts_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "simulate",
        "--p",
        "0.52",
        "--fraction",
        "2/3",
        "--n",
        "10",
        "--paths",
        "200",
        "--out",
        out,
    ];
    let run = bench(&args);
    assert_eq!(code(&run), 0);
    let stake: f64 = rows(&dir.path().join("drift.csv"))[0][0].parse().unwrap();
    assert!((stake - 2.0 / 75.0).abs() < 1e-15);
}

#[test]
fn tradeoff_defaults_order_volatility() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&bench(&["tradeoff", "--out", out])), 0);
    let file = dir.path().join("tradeoff.csv");
    assert_eq!(header(&file), "f,F,expected_wealth,volatility,utility");
    let vol = column(&file, 3);
    assert_eq!(vol.len(), 2);
    assert!(vol[0] < vol[1]);
    let curves = rows(&dir.path().join("tradeoff_curves.csv"));
    assert_eq!(curves.len(), 200);
    assert_eq!(curves[99][0], "1000");
}

#[test]
fn verify_reports_every_claim_once_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = bench(&["verify", "--quick", "--seed", "3", "--out", out]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stdout));
    let table = rows(&dir.path().join("errata.csv"));
    let mut ids: Vec<&str> = table.iter().map(|r| r[0].as_str()).collect();
    let total = ids.len();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), total);
    let covariance = table.iter().find(|r| r[0] == "covariance_uv").unwrap();
    assert_eq!(covariance[5], "mismatch");
    let identity = table.iter().find(|r| r[0] == "entropy_identity").unwrap();
    assert_eq!(identity[5], "match");
    assert!(table.iter().all(|r| r[7] != "REGRESSION"));
}
