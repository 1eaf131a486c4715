use std::fs;

use pa_aoi::config::{config_digest, to_json};
use pa_aoi::{load_config, paper_default, Error};

#[test]
fn bundled_scenario_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    let original = paper_default();
    fs::write(&path, to_json(&original)).unwrap();
    let loaded = load_config(&path).unwrap();
    assert_eq!(loaded, original);
    assert_eq!(config_digest(&loaded), config_digest(&original));
    assert!((loaded.comm.noise_w - 1e-15).abs() < 1e-27);
}

#[test]
fn every_violation_is_listed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut cfg: serde_json::Value = serde_json::from_str(&to_json(&paper_default())).unwrap();
    cfg["energy"]["conversion_eff"] = 1.3.into();
    cfg["rf"]["carrier_hz"] = (-1.0).into();
    cfg["devices"][0]["x_m"] = 99.0.into();
    fs::write(&path, cfg.to_string()).unwrap();
    match load_config(&path).unwrap_err() {
        Error::Validation(problems) => {
            assert_eq!(problems.len(), 3, "{problems:?}");
            for field in ["conversion_eff", "carrier_hz", "devices[0].x_m"] {
                assert!(
                    problems.iter().any(|p| p.contains(field)),
                    "{field} missing from {problems:?}"
                );
            }
        }
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn unreadable_and_malformed_files_map_to_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(load_config(dir.path().join("missing.json")).unwrap_err().exit_code(), 3);
    let path = dir.path().join("broken.json");
    fs::write(&path, "{ \"geometry\": ").unwrap();
    assert_eq!(load_config(&path).unwrap_err().exit_code(), 1);
    fs::write(&path, to_json(&paper_default()).replace("\"rf\"", "\"radio\"")).unwrap();
    assert_eq!(load_config(&path).unwrap_err().exit_code(), 1);
}
