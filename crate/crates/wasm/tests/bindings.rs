use pa_aoi_wasm::{compare_json, default_config_json, optimize_json, position_curve_json, MAX_DEMO_CYCLES};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn curve_spans_the_waveguide_and_bottoms_out_at_the_device() {
    let curve = parse(&position_curve_json(&default_config_json(), 141).unwrap());
    let points = curve.as_array().unwrap();
    assert_eq!(points.len(), 141);
    assert_eq!(points[0]["x_p_m"], 0.0);
    assert_eq!(points[140]["x_p_m"], 35.0);
    let best = points
        .iter()
        .min_by(|a, b| {
            a["aoi_corrected_s"]
                .as_f64()
                .unwrap()
                .total_cmp(&b["aoi_corrected_s"].as_f64().unwrap())
        })
        .unwrap();
    assert_eq!(best["x_p_m"], 10.0);
    assert!((best["aoi_corrected_s"].as_f64().unwrap() / 459835.0385 - 1.0).abs() < 1e-9);
}

#[test]
fn infinite_age_is_marked() {
    let mut cfg = parse(&default_config_json());
    cfg["comm"]["noise_w"] = 1e-6.into();
    let curve = parse(&position_curve_json(&cfg.to_string(), 2).unwrap());
    assert_eq!(curve[0]["aoi_paper_s"], "inf");
    assert_eq!(curve[0]["success_prob"], 0.0);
}

#[test]
fn optimizer_matches_the_reference_ratio() {
    let r = parse(&optimize_json(&default_config_json(), "single", 0.1, 0.0).unwrap());
    assert_eq!(r["x_p_star_m"], 10.0);
    assert!((r["baseline_ratio"].as_f64().unwrap() - 2.523095505189557).abs() < 1e-9);
}

#[test]
fn compare_is_deterministic_and_bounded() {
    let cfg = default_config_json();
    let a = compare_json(&cfg, 10.0, 2000, 5).unwrap();
    assert_eq!(a, compare_json(&cfg, 10.0, 2000, 5).unwrap());
    assert!(parse(&a)["verdict"].is_string());
    assert!(compare_json(&cfg, 10.0, MAX_DEMO_CYCLES + 1, 5).is_err());
}

#[test]
fn bad_input_is_reported() {
    assert!(position_curve_json("{", 10).is_err());
    assert!(position_curve_json(&default_config_json(), 1).is_err());
    assert!(optimize_json(&default_config_json(), "median", 0.1, 0.0)
        .unwrap_err()
        .contains("median"));
    let mut cfg = parse(&default_config_json());
    cfg["energy"]["conversion_eff"] = 1.3.into();
    assert!(compare_json(&cfg.to_string(), 10.0, 10, 0)
        .unwrap_err()
        .contains("conversion_eff"));
}
