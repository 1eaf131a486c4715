//! Scenario parameters and the physical-layer formulas: waveguide geometry,
//! probabilistic LoS blockage, linear energy harvesting, and the per-attempt
//! delivery probability.
//!
//! All quantities are SI: meters, seconds, watts, joules, hertz.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::RenewalParams;
use crate::error::{Error, Result};

/// Exact SI value of the speed of light.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Largest charge-slot count kept as an exact integer; beyond this an `f64`
/// can no longer represent every count.
pub const MAX_CHARGE_SLOTS: u64 = 1 << 53;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub waveguide_length_m: f64,
    pub waveguide_height_m: f64,
    pub area_x_m: f64,
    pub area_y_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Device {
    pub x_m: f64,
    pub y_m: f64,
    /// Aggregation weight for multi-device objectives.
    #[serde(default = "default_weight")]
    pub weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

impl Device {
    pub fn new(x_m: f64, y_m: f64) -> Self {
        Device { x_m, y_m, weight: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfParams {
    pub carrier_hz: f64,
    /// Blockage density; zero gives a deterministic LoS link.
    pub blockage_beta: f64,
    #[serde(default = "default_lightspeed")]
    pub lightspeed_m_s: f64,
}

fn default_lightspeed() -> f64 {
    SPEED_OF_LIGHT_M_S
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyParams {
    pub tx_power_w: f64,
    pub conversion_eff: f64,
    pub capacitor_j: f64,
    pub slot_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CommParamsRepr")]
pub struct CommParams {
    pub bandwidth_hz: f64,
    pub packet_bits: f64,
    pub noise_w: f64,
}

/// On-disk form: noise may be given in watts or in dBm, not both.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CommParamsRepr {
    bandwidth_hz: f64,
    packet_bits: f64,
    noise_w: Option<f64>,
    noise_dbm: Option<f64>,
}

impl TryFrom<CommParamsRepr> for CommParams {
    type Error = String;

    fn try_from(repr: CommParamsRepr) -> Result<Self, String> {
        let noise_w = match (repr.noise_w, repr.noise_dbm) {
            (Some(w), None) => w,
            (None, Some(dbm)) => dbm_to_watts(dbm),
            (Some(_), Some(_)) => return Err("comm: give either noise_w or noise_dbm, not both".into()),
            (None, None) => return Err("comm: missing noise_w or noise_dbm".into()),
        };
        Ok(CommParams {
            bandwidth_hz: repr.bandwidth_hz,
            packet_bits: repr.packet_bits,
            noise_w,
        })
    }
}

impl CommParams {
    /// Spectral efficiency the packet needs within one slot, D / (B Δ_T).
    pub fn theta(&self, slot_s: f64) -> f64 {
        self.packet_bits / (self.bandwidth_hz * slot_s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub geometry: Geometry,
    pub devices: Vec<Device>,
    pub rf: RfParams,
    pub energy: EnergyParams,
    pub comm: CommParams,
}

pub fn dbm_to_watts(value_dbm: f64) -> f64 {
    10f64.powf(value_dbm / 10.0) * 1e-3
}

/// Euclidean distance between the antenna at `(x_p, 0, h_w)` and the device
/// at `(x_u, y_u, 0)`.
pub fn pa_device_distance(geometry: &Geometry, device: &Device, x_p: f64) -> Result<f64> {
    if !(0.0..=geometry.waveguide_length_m).contains(&x_p) {
        return Err(Error::Domain(format!(
            "antenna position {x_p} m outside the waveguide [0, {}]",
            geometry.waveguide_length_m
        )));
    }
    let dx = x_p - device.x_m;
    let h = geometry.waveguide_height_m;
    Ok((dx * dx + device.y_m * device.y_m + h * h).sqrt())
}

/// Probability that the slot has a line-of-sight path, `exp(-beta d^2)`.
pub fn los_probability(rf: &RfParams, d: f64) -> f64 {
    (-rf.blockage_beta * d * d).exp()
}

/// Free-space constant `(c / (4 pi f_c))^2`.
pub fn antenna_constant(rf: &RfParams) -> f64 {
    let r = rf.lightspeed_m_s / (4.0 * PI * rf.carrier_hz);
    r * r
}

/// LoS power gain `eta / d^2`. A blocked slot has gain zero.
pub fn los_channel_gain(rf: &RfParams, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {d}")));
    }
    Ok(antenna_constant(rf) / (d * d))
}

/// Energy harvested in one slot with a LoS path.
pub fn per_slot_los_energy(energy: &EnergyParams, rf: &RfParams, d: f64) -> Result<f64> {
    let gain = los_channel_gain(rf, d)?;
    Ok(energy.conversion_eff * energy.tx_power_w * gain * energy.slot_s)
}

/// Number of LoS slots `K` needed to fill the capacitor, i.e. the smallest
/// `K` with `(K - 1) E < B_max <= K E`.
pub fn charge_slots_required(energy: &EnergyParams, rf: &RfParams, d: f64) -> Result<u64> {
    let slot_energy = per_slot_los_energy(energy, rf, d)?;
    charge_slots_for(energy.capacitor_j, slot_energy)
}

pub(crate) fn charge_slots_for(capacitor_j: f64, slot_energy_j: f64) -> Result<u64> {
    if !(slot_energy_j > 0.0) {
        return Err(Error::Domain(format!(
            "per-slot energy must be positive, got {slot_energy_j}"
        )));
    }
    let ratio = capacitor_j / slot_energy_j;
    if !ratio.is_finite() || ratio > MAX_CHARGE_SLOTS as f64 {
        return Err(Error::Overflow(ratio));
    }
    let mut k = (ratio.ceil() as u64).max(1);
    // The division may round across an integer; settle on the bracketing
    // evaluated with the same products the capacitor model uses.
    while k > 1 && ((k - 1) as f64) * slot_energy_j >= capacitor_j {
        k -= 1;
    }
    while (k as f64) * slot_energy_j < capacitor_j {
        k += 1;
    }
    Ok(k)
}

/// Distance beyond which a full-capacitor transmission cannot carry the
/// packet within one slot, even with a LoS path.
pub fn coverage_radius(comm: &CommParams, energy: &EnergyParams, rf: &RfParams) -> Result<f64> {
    let theta = comm.theta(energy.slot_s);
    if !(theta > 0.0) {
        return Err(Error::Domain(format!("theta must be positive, got {theta}")));
    }
    let snr_needed = (theta * std::f64::consts::LN_2).exp_m1();
    Ok((energy.capacitor_j * antenna_constant(rf) / (snr_needed * energy.slot_s * comm.noise_w)).sqrt())
}

/// Bits carried in one slot when the full capacitor is spent over a channel of
/// the given power gain.
pub fn slot_throughput_bits(comm: &CommParams, energy: &EnergyParams, gain: f64) -> f64 {
    let snr = energy.capacitor_j * gain / (energy.slot_s * comm.noise_w);
    comm.bandwidth_hz * energy.slot_s * snr.ln_1p() / std::f64::consts::LN_2
}

/// Probability that a transmission attempt from `device` with the antenna at
/// `x_p` delivers its packet. Zero outside the coverage radius.
pub fn success_probability(config: &SystemConfig, device: &Device, x_p: f64) -> Result<f64> {
    let d = pa_device_distance(&config.geometry, device, x_p)?;
    let radius = coverage_radius(&config.comm, &config.energy, &config.rf)?;
    Ok(if d <= radius {
        los_probability(&config.rf, d)
    } else {
        0.0
    })
}

/// Derived per-(device, position) link quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkBudget {
    pub distance_m: f64,
    pub los_prob: f64,
    pub channel_gain: f64,
    pub slot_energy_j: f64,
    pub charge_slots: u64,
    pub coverage_radius_m: f64,
    pub success_prob: f64,
}

impl LinkBudget {
    pub fn evaluate(config: &SystemConfig, device: &Device, x_p: f64) -> Result<Self> {
        let distance_m = pa_device_distance(&config.geometry, device, x_p)?;
        let los_prob = los_probability(&config.rf, distance_m);
        let channel_gain = los_channel_gain(&config.rf, distance_m)?;
        let slot_energy_j = per_slot_los_energy(&config.energy, &config.rf, distance_m)?;
        let charge_slots = charge_slots_for(config.energy.capacitor_j, slot_energy_j)?;
        let coverage_radius_m = coverage_radius(&config.comm, &config.energy, &config.rf)?;
        let success_prob = if distance_m <= coverage_radius_m { los_prob } else { 0.0 };
        Ok(LinkBudget {
            distance_m,
            los_prob,
            channel_gain,
            slot_energy_j,
            charge_slots,
            coverage_radius_m,
            success_prob,
        })
    }

    pub fn renewal(&self) -> RenewalParams {
        RenewalParams {
            charge_slots: self.charge_slots,
            los_prob: self.los_prob,
            success_prob: self.success_prob,
        }
    }
}
