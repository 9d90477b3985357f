//! Browser bindings for the quantizer lab.
//!
//! Each export returns a JSON string so the page needs no generated
//! TypeScript types. The `*_json` functions hold the logic and are plain
//! Rust, which keeps them testable off the browser.

use plscq::analysis::{
    evaluate_design, optimize_threshold, run_sweep, support_threshold_formula, SweepOptions,
};
use plscq::compressor::compressor_curve;
use plscq::Objective;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Upper bound on any grid the page may request.
const MAX_POINTS: usize = 5001;

fn check_points(points: usize) -> Result<(), String> {
    if points > MAX_POINTS {
        return Err(format!("at most {MAX_POINTS} points (got {points})"));
    }
    Ok(())
}

/// `{x, optimal, piecewise, breaks}` over `[-x_max, x_max]`.
pub fn curve_json(segments: u32, x_max: f64, points: usize) -> Result<String, String> {
    check_points(points)?;
    let rows = compressor_curve(segments, x_max, points).map_err(|e| e.to_string())?;
    let breaks: Vec<f64> = (0..=segments)
        .map(|i| x_max * i as f64 / segments as f64)
        .collect();
    Ok(json!({
        "x": rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
        "optimal": rows.iter().map(|r| r[1]).collect::<Vec<_>>(),
        "piecewise": rows.iter().map(|r| r[2]).collect::<Vec<_>>(),
        "breaks": breaks,
    })
    .to_string())
}

/// SQNR of the `(N, L)` design across a threshold grid under both
/// distortion models, plus the optimum and the closed-form threshold.
pub fn threshold_scan_json(
    levels: u32,
    segments: u32,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<String, String> {
    check_points(points)?;
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err("need 0 < lo < hi and at least 2 points".into());
    }
    let mut xs = Vec::with_capacity(points);
    let mut high_rate = Vec::with_capacity(points);
    let mut exact = Vec::with_capacity(points);
    for k in 0..points {
        let x = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        let (_, hr) = evaluate_design(levels, segments, x, Objective::HighRateFormula)
            .map_err(|e| e.to_string())?;
        let (_, ex) = evaluate_design(levels, segments, x, Objective::ExactClosedForm)
            .map_err(|e| e.to_string())?;
        xs.push(x);
        high_rate.push(hr.sqnr_db);
        exact.push(ex.sqnr_db);
    }
    let best = optimize_threshold(levels, segments, Objective::HighRateFormula)
        .map_err(|e| e.to_string())?;
    let formula = support_threshold_formula(levels).map_err(|e| e.to_string())?;
    Ok(json!({
        "x": xs,
        "high_rate": high_rate,
        "exact": exact,
        "optimum": { "x_max": best.x_max, "sqnr_db": best.report.sqnr_db },
        "formula_x_max": formula,
    })
    .to_string())
}

/// The segment sweep with the default options.
pub fn sweep_json(levels: u32, segments: &[u32]) -> Result<String, String> {
    run_sweep(levels, segments, &SweepOptions::default())
        .map(|r| r.to_json())
        .map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn compressor_curve_data(segments: u32, x_max: f64, points: usize) -> Result<String, JsError> {
    curve_json(segments, x_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sqnr_vs_threshold(
    levels: u32,
    segments: u32,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<String, JsError> {
    threshold_scan_json(levels, segments, lo, hi, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn segment_sweep(levels: u32, segments: Vec<u32>) -> Result<String, JsError> {
    sweep_json(levels, &segments).map_err(|e| JsError::new(&e))
}
