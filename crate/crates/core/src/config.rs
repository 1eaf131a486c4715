//! JSON configuration loading and validation.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::SystemConfig;

const DEFAULT_CONFIG: &str = include_str!("../data/default.json");

/// The bundled reference scenario: 35 m waveguide at 10 m height, one device
/// at (10, 3), 28 GHz, 10 W, 70 % conversion, 2^-5 J capacitor, 1000-bit
/// packets over 1 kHz, -120 dBm noise, beta = 1e-3.
pub fn paper_default() -> SystemConfig {
    from_json_str(DEFAULT_CONFIG).expect("bundled configuration is valid")
}

pub fn from_json_str(text: &str) -> Result<SystemConfig> {
    let config: SystemConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SystemConfig> {
    from_json_str(&fs::read_to_string(path)?)
}

pub fn to_json(config: &SystemConfig) -> String {
    serde_json::to_string_pretty(config).expect("configuration serializes")
}

/// A single-device variant of the bundled scenario whose link, with the
/// antenna directly above the device at `x_p = 10`, needs exactly
/// `charge_slots` LoS slots per charge and has LoS probability `los_prob`.
///
/// The device sits at (10, 0), so the distance is the 10 m waveguide height.
/// Blockage density and capacitor size are solved for; noise is lowered so
/// the link stays inside coverage.
pub fn scenario_with_link(charge_slots: u64, los_prob: f64) -> SystemConfig {
    assert!(charge_slots >= 1 && los_prob > 0.0 && los_prob <= 1.0);
    let mut config = paper_default();
    config.devices = vec![crate::model::Device::new(10.0, 0.0)];
    let d = config.geometry.waveguide_height_m;
    config.rf.blockage_beta = -los_prob.ln() / (d * d);
    let slot_energy = crate::model::per_slot_los_energy(&config.energy, &config.rf, d).expect("positive distance");
    config.energy.capacitor_j = (charge_slots as f64 - 0.5) * slot_energy;
    config.comm.noise_w = 1e-18;
    config
}

/// SHA-256 of the compact JSON form, hex encoded.
pub fn config_digest(config: &SystemConfig) -> String {
    let compact = serde_json::to_vec(config).expect("configuration serializes");
    hex::encode(Sha256::digest(&compact))
}

impl SystemConfig {
    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                errors.push(msg);
            }
        };
        let positive = |v: f64| v > 0.0 && v.is_finite();

        let g = &self.geometry;
        check(
            positive(g.waveguide_length_m),
            format!("geometry.waveguide_length_m must be > 0, got {}", g.waveguide_length_m),
        );
        check(
            positive(g.waveguide_height_m),
            format!("geometry.waveguide_height_m must be > 0, got {}", g.waveguide_height_m),
        );
        check(
            positive(g.area_x_m),
            format!("geometry.area_x_m must be > 0, got {}", g.area_x_m),
        );
        check(
            positive(g.area_y_m),
            format!("geometry.area_y_m must be > 0, got {}", g.area_y_m),
        );

        check(!self.devices.is_empty(), "devices must not be empty".to_string());
        for (i, d) in self.devices.iter().enumerate() {
            check(
                (0.0..=g.area_x_m).contains(&d.x_m),
                format!("devices[{i}].x_m must lie in [0, {}], got {}", g.area_x_m, d.x_m),
            );
            check(
                d.y_m.abs() <= g.area_y_m / 2.0,
                format!(
                    "devices[{i}].y_m must lie in [-{h}, {h}], got {}",
                    d.y_m,
                    h = g.area_y_m / 2.0
                ),
            );
            check(
                d.weight >= 0.0 && d.weight.is_finite(),
                format!("devices[{i}].weight must be >= 0, got {}", d.weight),
            );
        }

        let rf = &self.rf;
        check(
            positive(rf.carrier_hz),
            format!("rf.carrier_hz must be > 0, got {}", rf.carrier_hz),
        );
        check(
            positive(rf.lightspeed_m_s),
            format!("rf.lightspeed_m_s must be > 0, got {}", rf.lightspeed_m_s),
        );
        check(
            (0.0..=1.0).contains(&rf.blockage_beta),
            format!("rf.blockage_beta must lie in [0, 1], got {}", rf.blockage_beta),
        );

        let e = &self.energy;
        check(
            positive(e.tx_power_w),
            format!("energy.tx_power_w must be > 0, got {}", e.tx_power_w),
        );
        check(
            e.conversion_eff > 0.0 && e.conversion_eff < 1.0,
            format!("energy.conversion_eff must lie in (0, 1), got {}", e.conversion_eff),
        );
        check(
            positive(e.capacitor_j),
            format!("energy.capacitor_j must be > 0, got {}", e.capacitor_j),
        );
        check(
            positive(e.slot_s),
            format!("energy.slot_s must be > 0, got {}", e.slot_s),
        );

        let c = &self.comm;
        check(
            positive(c.bandwidth_hz),
            format!("comm.bandwidth_hz must be > 0, got {}", c.bandwidth_hz),
        );
        check(
            positive(c.packet_bits),
            format!("comm.packet_bits must be > 0, got {}", c.packet_bits),
        );
        check(
            positive(c.noise_w),
            format!("comm.noise_w must be > 0, got {}", c.noise_w),
        );

        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }
}
