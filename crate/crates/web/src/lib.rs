//! Browser bindings. Every export returns a JSON string for the page to plot.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use dhs::deconv::{
    apriori_bound, sharpen_with_truth, synth_spectrum, Grid, Peak, PeakModel, SharpenConfig, SharpenReport,
};
use dhs::hardy::{diff_experiment, hardy_norm, DiffReport, HardyFunction};
use dhs::index_fn::{log_grid, IndexFunction};
use dhs::spectral::GridSignal;

const GRID: Grid = Grid { n: 1024, dx: 0.05, x0: -25.6 };
const VIEW: (f64, f64) = (-8.0, 8.0);

#[derive(Serialize)]
struct Trace {
    x: Vec<f64>,
    f: Vec<f64>,
    g_eps: Vec<f64>,
    z_eps: Vec<f64>,
    report: SharpenReport,
}

fn visible(s: &GridSignal) -> Vec<f64> {
    (0..s.len()).filter(|&j| (VIEW.0..=VIEW.1).contains(&s.x(j))).map(|j| s.samples()[j]).collect()
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn sharpen_json(model: &str, beta: f64, epsilon: f64, separation: f64, seed: u64) -> Result<String, String> {
    let model = PeakModel::parse(model).ok_or_else(|| format!("unknown peak model {model:?}"))?;
    let half = 0.5 * separation;
    let peaks = [
        Peak { center: -half, amplitude: 1.0, width: 0.6 },
        Peak { center: half, amplitude: 0.7, width: 0.6 },
    ];
    let data = synth_spectrum(&peaks, model, 1.0, epsilon, seed, GRID).map_err(|e| e.to_string())?;
    let cfg = SharpenConfig::new(model, 1.0, beta, epsilon);
    let report = sharpen_with_truth(&data.g_eps, &cfg, &data.f_hat).map_err(|e| e.to_string())?;
    let x = (0..data.f.len()).map(|j| data.f.x(j)).filter(|x| (VIEW.0..=VIEW.1).contains(x)).collect();
    json(&Trace {
        x,
        f: visible(&data.f),
        g_eps: visible(&data.g_eps),
        z_eps: visible(&report.z_eps),
        report,
    })
}

#[derive(Serialize)]
struct BoundCurves {
    epsilon: Vec<f64>,
    vhs: Vec<f64>,
    ohs: Vec<f64>,
}

/// A priori bounds over `ε ∈ [1e-8, C/2]` for `ψ = exp` against `ψ = t^m`.
pub fn bounds_json(c: f64, m: f64) -> Result<String, String> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(format!("C must be positive, got {c}"));
    }
    let phi = IndexFunction::PowerLaw { p: 1.0 };
    let ohs_psi = IndexFunction::power_law(m).map_err(|e| e.to_string())?;
    let epsilon = log_grid(1e-8 * c, 0.5 * c, 60);
    let mut curves = BoundCurves { epsilon: epsilon.clone(), vhs: Vec::new(), ohs: Vec::new() };
    for &eps in &epsilon {
        curves.vhs.push(apriori_bound(&phi, &IndexFunction::Exp, c, eps).map_err(|e| e.to_string())?);
        curves.ohs.push(apriori_bound(&phi, &ohs_psi, c, eps).map_err(|e| e.to_string())?);
    }
    json(&curves)
}

#[derive(Serialize)]
struct HardyTrace {
    c: f64,
    trials: Vec<DiffReport>,
}

pub fn hardy_json(r: f64, seed: u64) -> Result<String, String> {
    let g = HardyFunction::analytic(128, 1.5 * r, r, 0.9, seed).map_err(|e| e.to_string())?;
    let c = hardy_norm(&g, r).map_err(|e| e.to_string())?;
    let trials = log_grid(1e-6, 1e-1, 16)
        .into_iter()
        .enumerate()
        .map(|(i, eps)| diff_experiment(&g, r, eps, seed.wrapping_add(i as u64 + 1)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    json(&HardyTrace { c, trials })
}

#[wasm_bindgen]
pub fn sharpen_demo(model: &str, beta: f64, epsilon: f64, separation: f64, seed: u32) -> Result<String, JsValue> {
    sharpen_json(model, beta, epsilon, separation, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bound_curves(c: f64, m: f64) -> Result<String, JsValue> {
    bounds_json(c, m).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn hardy_demo(r: f64, seed: u32) -> Result<String, JsValue> {
    hardy_json(r, seed as u64).map_err(|e| JsValue::from_str(&e))
}
