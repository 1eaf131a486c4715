//! Browser bindings for the static demo page in `www/`.
//!
//! Each export takes the scenario as a JSON string and returns JSON, so the
//! page needs no generated type definitions. The `*_json` functions hold the
//! logic and are what the native tests exercise.

use pa_aoi::analytic::{average_aoi, ModelVariant};
use pa_aoi::bench::compare::compare;
use pa_aoi::config::{from_json_str, to_json};
use pa_aoi::placement::{fixed_antenna_baseline, optimize_position, PlacementSpec};
use pa_aoi::sim::{SimMode, SimSpec};
use pa_aoi::{paper_default, LinkBudget, Metric};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Upper bound on simulated deliveries per request so the tab stays responsive.
pub const MAX_DEMO_CYCLES: u64 = 200_000;

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub x_p_m: f64,
    pub success_prob: f64,
    pub aoi_paper_s: Metric,
    pub aoi_corrected_s: Metric,
}

#[derive(Debug, Serialize)]
pub struct Placement {
    pub x_p_star_m: f64,
    pub aoi_star_s: Metric,
    pub x_fixed_m: f64,
    pub aoi_fixed_s: Metric,
    pub baseline_ratio: Metric,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn default_config_json() -> String {
    to_json(&paper_default())
}

/// Closed-form age and delivery probability at `points` evenly spaced
/// antenna positions along the waveguide, for the first device.
pub fn position_curve_json(config_json: &str, points: usize) -> Result<String, String> {
    let config = from_json_str(config_json).map_err(err)?;
    if points < 2 {
        return Err("need at least two points".into());
    }
    let length = config.geometry.waveguide_length_m;
    let device = &config.devices[0];
    let curve = (0..points)
        .map(|i| {
            let x_p = length * i as f64 / (points - 1) as f64;
            let budget = LinkBudget::evaluate(&config, device, x_p)?;
            let link = budget.renewal();
            let slot = config.energy.slot_s;
            Ok(CurvePoint {
                x_p_m: x_p,
                success_prob: budget.success_prob,
                aoi_paper_s: average_aoi(&link, slot, ModelVariant::PaperClosedForm),
                aoi_corrected_s: average_aoi(&link, slot, ModelVariant::CorrectedCompound),
            })
        })
        .collect::<pa_aoi::Result<Vec<_>>>()
        .map_err(err)?;
    serde_json::to_string(&curve).map_err(err)
}

/// Age-optimal antenna position for all devices under `objective`
/// (`single`, `sum`, `max` or `wsum`), against an antenna fixed at `x_fixed_m`.
pub fn optimize_json(config_json: &str, objective: &str, grid_step_m: f64, x_fixed_m: f64) -> Result<String, String> {
    let config = from_json_str(config_json).map_err(err)?;
    let mut spec = PlacementSpec::for_config(&config);
    spec.objective = objective.parse()?;
    spec.grid_step_m = grid_step_m;
    let best = optimize_position(&config, &spec).map_err(err)?;
    let fixed = fixed_antenna_baseline(&config, &spec, x_fixed_m).map_err(err)?;
    let baseline_ratio = match (fixed.aoi_star_s, best.aoi_star_s) {
        (Metric::Finite(a), Metric::Finite(b)) => Metric::Finite(a / b),
        _ => Metric::Infinite,
    };
    serde_json::to_string(&Placement {
        x_p_star_m: best.x_p_star_m,
        aoi_star_s: best.aoi_star_s,
        x_fixed_m,
        aoi_fixed_s: fixed.aoi_star_s,
        baseline_ratio,
    })
    .map_err(err)
}

/// Fast-renewal simulation at `x_p` next to both closed forms, with the
/// second-moment verdict.
pub fn compare_json(config_json: &str, x_p: f64, cycles: u64, seed: u64) -> Result<String, String> {
    let config = from_json_str(config_json).map_err(err)?;
    if cycles > MAX_DEMO_CYCLES {
        return Err(format!("at most {MAX_DEMO_CYCLES} cycles in the browser"));
    }
    let record = compare(&config, 0, x_p, &SimSpec::new(SimMode::FastRenewal, cycles, seed)).map_err(err)?;
    serde_json::to_string(&record).map_err(err)
}

#[wasm_bindgen(js_name = defaultConfig)]
pub fn default_config() -> String {
    default_config_json()
}

#[wasm_bindgen(js_name = positionCurve)]
pub fn position_curve(config_json: &str, points: usize) -> Result<String, JsError> {
    position_curve_json(config_json, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = optimizePosition)]
pub fn optimize(config_json: &str, objective: &str, grid_step_m: f64, x_fixed_m: f64) -> Result<String, JsError> {
    optimize_json(config_json, objective, grid_step_m, x_fixed_m).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = compareModels)]
pub fn compare_models(config_json: &str, x_p: f64, cycles: u32, seed: u32) -> Result<String, JsError> {
    compare_json(config_json, x_p, u64::from(cycles), u64::from(seed)).map_err(|e| JsError::new(&e))
}
