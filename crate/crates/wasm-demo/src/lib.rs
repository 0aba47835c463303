//! Browser bindings for the rate, drift and dark-count analytics.
//!
//! Every export returns a flat `Float64Array`; the page reshapes it.

use distill_core::analytics::{
    crossover_t, dark_count_region, optimize_theta, sweep, Objective, RegionClass,
};
use distill_core::photonics::ApparatusParams;
use wasm_bindgen::prelude::*;

fn js(e: impl ToString) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// `[T, R_ours, R_reference]` triples on a log grid, per attempt time.
pub fn rate_curve_rows(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let ts = sweep::log_space(t_min, t_max.min(1.0), points).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * ts.len());
    for t in ts {
        let params = ApparatusParams::symmetric(t).map_err(|e| e.to_string())?;
        let best = optimize_theta(&params, Objective::BellRate).map_err(|e| e.to_string())?;
        out.extend([t, best.rate, t * t / 2.0]);
    }
    Ok(out)
}

/// Raw fidelities on a `points × points` grid over `[0, dx_max] × [0, dt_max]`, `D_x` major.
pub fn drift_surface_values(dx_max: f64, dt_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let dxs = sweep::lin_space(0.0, dx_max, points).map_err(|e| e.to_string())?;
    let dts = sweep::lin_space(0.0, dt_max, points).map_err(|e| e.to_string())?;
    let rows = sweep::drift_grid(&dxs, &dts).map_err(|e| e.to_string())?;
    Ok(rows.iter().map(|r| r.fidelity_raw()).collect())
}

/// Region codes (0 ours better, 1 reference better, 2 no-go), `T` major.
pub fn dark_count_codes(
    t_points: usize,
    p_min: f64,
    p_max: f64,
    p_points: usize,
) -> Result<Vec<f64>, String> {
    let ts = sweep::log_space(1e-4, 1.0, t_points).map_err(|e| e.to_string())?;
    let ps = sweep::log_space(p_min, p_max, p_points).map_err(|e| e.to_string())?;
    let region = dark_count_region(&ts, &ps, 1.0).map_err(|e| e.to_string())?;
    Ok(region
        .iter()
        .map(|p| match p.class {
            RegionClass::OursBetter => 0.0,
            RegionClass::ReferenceBetter => 1.0,
            RegionClass::NoGo => 2.0,
        })
        .collect())
}

#[wasm_bindgen]
pub fn rate_curve(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    rate_curve_rows(t_min, t_max, points).map_err(js)
}

#[wasm_bindgen]
pub fn drift_surface(dx_max: f64, dt_max: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    drift_surface_values(dx_max, dt_max, points).map_err(js)
}

#[wasm_bindgen]
pub fn dark_count_map(
    t_points: usize,
    p_min: f64,
    p_max: f64,
    p_points: usize,
) -> Result<Vec<f64>, JsValue> {
    dark_count_codes(t_points, p_min, p_max, p_points).map_err(js)
}

#[wasm_bindgen]
pub fn crossover() -> f64 {
    crossover_t()
}
