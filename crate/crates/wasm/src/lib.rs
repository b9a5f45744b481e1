//! Browser bindings for the demo page in `www/`.
//!
//! Each export returns a flat `Float64Array` so the page can plot it without
//! any glue beyond the generated module. The pure functions behind them are
//! plain Rust and are tested natively.

use kelly_core::kelly::utility_curve as core_curve;
use kelly_core::martingale::expected_wealth_linear;
use kelly_core::risk::wealth_variance_exact;
use kelly_core::{
    f_star, f_star_approx, kelly_fraction, simulate, BetFraction, GameParams, KellyError,
    Recording, SimConfig, Wager,
};
use wasm_bindgen::prelude::*;

/// Paths the page may request at once.
pub const MAX_PATHS: usize = 2_000;
/// Trials per path the page may request.
pub const MAX_TRIALS: u64 = 5_000;

fn err(e: KellyError) -> String {
    e.to_string()
}

/// `[F0, U0, F1, U1, ...]`, with `-inf` at the last point.
pub fn curve(p: f64, points: usize) -> Result<Vec<f64>, String> {
    let game = GameParams::new(p).map_err(err)?;
    Ok(core_curve(game, points)
        .map_err(err)?
        .into_iter()
        .flat_map(|(f, u)| [f, u.value()])
        .collect())
}

/// `[F_K, F*, 2 F_K + ε, ε]`, or an error when the game has no edge.
pub fn regime_points(p: f64) -> Result<Vec<f64>, String> {
    let game = GameParams::new(p).map_err(err)?;
    if p <= 0.5 {
        return Err(err(KellyError::NoEdge { p }));
    }
    let fk = kelly_fraction(game).map_err(err)?.get();
    let root = f_star(game, kelly_core::kelly::ROOT_TOL)
        .map_err(err)?
        .get();
    let series = f_star_approx(game).map_err(err)?;
    Ok(vec![fk, root, series.approx, series.epsilon])
}

/// Rows `[N, E_full, σ_full, E_frac, σ_frac]` for `N = 0..=trials` in
/// `steps` increments, comparing full Kelly with `f` times Kelly.
pub fn tradeoff(p: f64, f: f64, trials: u64, w0: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(format!("Kelly multiplier must lie in (0, 1], got {f}"));
    }
    if p <= 0.5 {
        return Err(err(KellyError::NoEdge { p }));
    }
    let game = GameParams::new(p).map_err(err)?;
    let full = kelly_fraction(game).map_err(err)?;
    let frac = BetFraction::new(f * full.get()).map_err(err)?;
    let steps = steps.max(1);
    let mut out = Vec::with_capacity(5 * (steps + 1));
    for j in 0..=steps {
        let n = (j as f64 * trials as f64 / steps as f64).round() as u64;
        out.push(n as f64);
        for stake in [full, frac] {
            let (mean, vol) = if n == 0 {
                (w0, 0.0)
            } else {
                let wager = Wager::new(w0, game, stake, n).map_err(err)?;
                (
                    expected_wealth_linear(&wager),
                    wealth_variance_exact(&wager).sqrt(),
                )
            };
            out.push(mean);
            out.push(vol);
        }
    }
    Ok(out)
}

/// Full wealth paths, `paths` blocks of `trials + 1` values, followed by one
/// block holding the across-path mean.
pub fn sample_paths(
    p: f64,
    stake: f64,
    trials: u64,
    paths: usize,
    seed: u64,
    w0: f64,
) -> Result<Vec<f64>, String> {
    if paths == 0 || paths > MAX_PATHS {
        return Err(format!("paths must lie in 1..={MAX_PATHS}, got {paths}"));
    }
    if trials > MAX_TRIALS {
        return Err(format!("trials must be at most {MAX_TRIALS}, got {trials}"));
    }
    let game = GameParams::new(p).map_err(err)?;
    let wager = Wager::new(w0, game, BetFraction::new(stake).map_err(err)?, trials).map_err(err)?;
    let config = SimConfig::new(wager, paths, seed)
        .map_err(err)?
        .with_recording(Recording::Full);
    let batch = simulate(&config).map_err(err)?;
    let len = trials as usize + 1;
    let mut out = Vec::with_capacity((paths + 1) * len);
    let mut mean = vec![0.0; len];
    for k in 0..paths {
        let path = batch.path_wealth(k);
        for (m, w) in mean.iter_mut().zip(path) {
            *m += w / paths as f64;
        }
        out.extend_from_slice(path);
    }
    out.extend_from_slice(&mean);
    Ok(out)
}

#[wasm_bindgen(js_name = utilityCurve)]
pub fn utility_curve_js(p: f64, points: usize) -> Result<Vec<f64>, JsError> {
    curve(p, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = regimePoints)]
pub fn regime_points_js(p: f64) -> Result<Vec<f64>, JsError> {
    regime_points(p).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = tradeoffCurves)]
pub fn tradeoff_js(
    p: f64,
    f: f64,
    trials: u32,
    w0: f64,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    tradeoff(p, f, trials.into(), w0, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = samplePaths)]
pub fn sample_paths_js(
    p: f64,
    stake: f64,
    trials: u32,
    paths: usize,
    seed: u32,
    w0: f64,
) -> Result<Vec<f64>, JsError> {
    sample_paths(p, stake, trials.into(), paths, seed.into(), w0).map_err(|e| JsError::new(&e))
}
