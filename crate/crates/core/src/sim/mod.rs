//! Seeded Monte-Carlo simulation of the harvest-then-transmit cycle.
//!
//! [`SimMode::ExactSlot`] steps through individual slots: every charging slot
//! draws a LoS indicator and adds the harvested energy to a capacitor that
//! clamps at `B_max`; once full, the next slot transmits with all stored
//! energy and succeeds when the slot has LoS and the Shannon rate carries the
//! packet. [`SimMode::FastRenewal`] skips the slot loop and samples whole
//! cycles from their charge-time and attempt-count distributions.
//!
//! Time zero is treated as a delivery epoch with an empty capacitor, and every
//! run stops on a delivery, so estimates cover complete cycles only. Age is
//! counted in integer slots: it is 1 in a delivery slot and grows by one each
//! slot after, so a cycle of `S` slots contributes `S (S + 1) / 2`.
//!
//! Randomness comes from ChaCha8 seeded with the master seed; replication `r`
//! uses stream `r` of that seed.

mod sampling;
pub(crate) mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution};
use serde::{Deserialize, Serialize};

pub use sampling::negative_binomial_sample;

use crate::analytic::RenewalParams;
use crate::error::{Error, Result};
use crate::model::{self, Device, LinkBudget, SystemConfig};
use stats::{RatioStats, Welford};

/// Two-sided 95 % normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimMode {
    ExactSlot,
    FastRenewal,
}

impl std::str::FromStr for SimMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" | "ExactSlot" => Ok(SimMode::ExactSlot),
            "fast" | "FastRenewal" => Ok(SimMode::FastRenewal),
            other => Err(format!("unknown simulation mode {other:?} (expected exact or fast)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub mode: SimMode,
    /// Deliveries to collect per replication.
    pub target_cycles: u64,
    /// Optional cap on simulated slots per replication.
    pub max_slots: Option<u64>,
    pub seed: u64,
    pub replications: u32,
    /// Run replications on the rayon pool. Results do not depend on it.
    #[serde(default)]
    pub parallel: bool,
}

impl SimSpec {
    pub fn new(mode: SimMode, target_cycles: u64, seed: u64) -> Self {
        SimSpec {
            mode,
            target_cycles,
            max_slots: None,
            seed,
            replications: 1,
            parallel: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.target_cycles == 0 {
            return Err(Error::Domain("target_cycles must be at least 1".into()));
        }
        if self.replications == 0 {
            return Err(Error::Domain("replications must be at least 1".into()));
        }
        Ok(())
    }
}

/// Identifies the link a result was simulated on; results only merge when
/// their tags agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTag {
    pub x_p_m: Option<f64>,
    pub charge_slots: u64,
    pub los_prob: f64,
    pub success_prob: f64,
    pub slot_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub mode: SimMode,
    pub avg_aoi_s: f64,
    /// 95 % half-width on `avg_aoi_s`.
    pub ci_halfwidth_s: f64,
    pub aoi_se_s: f64,
    pub e_s_hat: f64,
    pub e_s_se: f64,
    pub e_s2_hat: f64,
    pub e_s2_se: f64,
    pub e_t_hat: f64,
    pub e_t_se: f64,
    pub p_s_hat: f64,
    pub p_s_se: f64,
    pub cycles: u64,
    pub attempts: u64,
    pub replications: u32,
    pub seed: u64,
    pub scenario: ScenarioTag,
}

impl SimResult {
    /// 95 % interval on the empirical `E[S^2]`.
    pub fn e_s2_ci(&self) -> (f64, f64) {
        (self.e_s2_hat - Z95 * self.e_s2_se, self.e_s2_hat + Z95 * self.e_s2_se)
    }

    pub fn aoi_ci(&self) -> (f64, f64) {
        (
            self.avg_aoi_s - self.ci_halfwidth_s,
            self.avg_aoi_s + self.ci_halfwidth_s,
        )
    }
}

/// Per-replication bookkeeping over complete cycles.
#[derive(Debug, Default)]
struct CycleAccumulator {
    cycles: u64,
    attempts: u64,
    total_slots: u64,
    area: u128,
    cycle_len: Welford,
    cycle_len_sq: Welford,
    charge_time: Welford,
    age_ratio: RatioStats,
}

impl CycleAccumulator {
    fn record_attempt(&mut self, charge_slots: u64) {
        self.attempts += 1;
        self.charge_time.push(charge_slots as f64);
    }

    fn record_cycle(&mut self, slots: u64) {
        let s = slots as f64;
        let area = u128::from(slots) * u128::from(slots + 1) / 2;
        self.cycles += 1;
        self.total_slots += slots;
        self.area += area;
        self.cycle_len.push(s);
        self.cycle_len_sq.push(s * s);
        self.age_ratio.push(s, area as f64);
    }

    fn finish(self, mode: SimMode, seed: u64, scenario: ScenarioTag) -> SimResult {
        let slot_s = scenario.slot_s;
        let ratio = self.area as f64 / self.total_slots as f64;
        let aoi_se_s = slot_s * self.age_ratio.ratio_std_err(ratio);
        let p_s_hat = self.cycles as f64 / self.attempts as f64;
        SimResult {
            mode,
            avg_aoi_s: slot_s * ratio,
            ci_halfwidth_s: Z95 * aoi_se_s,
            aoi_se_s,
            e_s_hat: self.total_slots as f64 / self.cycles as f64,
            e_s_se: self.cycle_len.std_err(),
            e_s2_hat: self.cycle_len_sq.mean(),
            e_s2_se: self.cycle_len_sq.std_err(),
            e_t_hat: self.charge_time.mean(),
            e_t_se: self.charge_time.std_err(),
            p_s_hat,
            p_s_se: (p_s_hat * (1.0 - p_s_hat) / self.attempts as f64).sqrt(),
            cycles: self.cycles,
            attempts: self.attempts,
            replications: 1,
            seed,
            scenario,
        }
    }
}

fn replication_rng(seed: u64, replication: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(replication));
    rng
}

fn check_budget(spec: &SimSpec, slots: u64, cycles: u64) -> Result<()> {
    match spec.max_slots {
        Some(max_slots) if slots > max_slots => Err(Error::BudgetExceeded { max_slots, cycles }),
        _ => Ok(()),
    }
}

fn run_replications<F>(spec: &SimSpec, run: F) -> Result<SimResult>
where
    F: Fn(u32) -> Result<SimResult> + Sync,
{
    spec.validate()?;
    let results: Result<Vec<_>> = crate::par::map_indexed(spec.replications as usize, spec.parallel, |r| run(r as u32))
        .into_iter()
        .collect();
    merge_replications(&results?)
}

/// Everything the slot-level simulator needs, derived once per scenario.
struct SlotModel {
    los_prob: f64,
    slot_energy_j: f64,
    capacitor_j: f64,
    gain: f64,
    tag: ScenarioTag,
}

/// Summary of one exact-slot replication with the per-cycle trace.
#[derive(Debug, Clone)]
pub struct ExactTrace {
    pub result: SimResult,
    pub cycle_lengths: Vec<u64>,
    /// Age summed slot by slot, in slot units.
    pub slot_area: u128,
}

impl SlotModel {
    fn new(config: &SystemConfig, device: &Device, x_p: f64) -> Result<Self> {
        let d = model::pa_device_distance(&config.geometry, device, x_p)?;
        let gain = model::los_channel_gain(&config.rf, d)?;
        let los_prob = model::los_probability(&config.rf, d);
        let full_rate = model::slot_throughput_bits(&config.comm, &config.energy, gain);
        if !(los_prob > 0.0) || full_rate < config.comm.packet_bits {
            return Err(Error::Infeasible(format!(
                "no transmission from device at ({}, {}) can succeed with the antenna at {x_p} m",
                device.x_m, device.y_m
            )));
        }
        let budget = LinkBudget::evaluate(config, device, x_p)?;
        Ok(SlotModel {
            los_prob,
            slot_energy_j: model::per_slot_los_energy(&config.energy, &config.rf, d)?,
            capacitor_j: config.energy.capacitor_j,
            gain,
            tag: ScenarioTag {
                x_p_m: Some(x_p),
                charge_slots: budget.charge_slots,
                los_prob,
                success_prob: budget.success_prob,
                slot_s: config.energy.slot_s,
            },
        })
    }

    fn run(&self, config: &SystemConfig, spec: &SimSpec, replication: u32, keep_trace: bool) -> Result<ExactTrace> {
        let mut rng = replication_rng(spec.seed, replication);
        let los = Bernoulli::new(self.los_prob).expect("probability in (0, 1]");
        let mut acc = CycleAccumulator::default();
        let mut lengths = Vec::new();

        let mut stored = 0.0f64;
        let mut age: u64 = 1;
        let mut slot_area: u128 = 0;
        let mut slots: u64 = 0;
        let mut cycle_len: u64 = 0;
        let mut charging: u64 = 0;

        while acc.cycles < spec.target_cycles {
            slots += 1;
            check_budget(spec, slots, acc.cycles)?;
            cycle_len += 1;

            let mut delivered = false;
            if stored >= self.capacitor_j {
                acc.record_attempt(charging);
                charging = 0;
                let gain = if los.sample(&mut rng) { self.gain } else { 0.0 };
                delivered = model::slot_throughput_bits(&config.comm, &config.energy, gain) >= config.comm.packet_bits;
                stored = 0.0;
            } else {
                charging += 1;
                if los.sample(&mut rng) {
                    stored = (stored + self.slot_energy_j).min(self.capacitor_j);
                }
            }

            age = if delivered { 1 } else { age + 1 };
            slot_area += u128::from(age);

            if delivered {
                acc.record_cycle(cycle_len);
                if keep_trace {
                    lengths.push(cycle_len);
                }
                cycle_len = 0;
            }
        }

        debug_assert_eq!(slot_area, acc.area);
        Ok(ExactTrace {
            result: acc.finish(SimMode::ExactSlot, spec.seed, self.tag),
            cycle_lengths: lengths,
            slot_area,
        })
    }
}

/// Slot-by-slot simulation of the device at antenna position `x_p`.
pub fn simulate_exact(config: &SystemConfig, device: &Device, x_p: f64, spec: &SimSpec) -> Result<SimResult> {
    let slot_model = SlotModel::new(config, device, x_p)?;
    run_replications(spec, |r| Ok(slot_model.run(config, spec, r, false)?.result))
}

/// A single exact-slot replication that also returns its cycle lengths.
pub fn simulate_exact_trace(
    config: &SystemConfig,
    device: &Device,
    x_p: f64,
    spec: &SimSpec,
    replication: u32,
) -> Result<ExactTrace> {
    spec.validate()?;
    SlotModel::new(config, device, x_p)?.run(config, spec, replication, true)
}

/// Renewal-sampling simulation of the device at antenna position `x_p`.
pub fn simulate_fast(config: &SystemConfig, device: &Device, x_p: f64, spec: &SimSpec) -> Result<SimResult> {
    let budget = LinkBudget::evaluate(config, device, x_p)?;
    let tag = ScenarioTag {
        x_p_m: Some(x_p),
        charge_slots: budget.charge_slots,
        los_prob: budget.los_prob,
        success_prob: budget.success_prob,
        slot_s: config.energy.slot_s,
    };
    simulate_fast_tagged(tag, spec)
}

/// Renewal-sampling simulation from the renewal parameters alone. The
/// delivery probability need not equal the LoS probability here.
pub fn simulate_fast_link(link: &RenewalParams, slot_s: f64, spec: &SimSpec) -> Result<SimResult> {
    let tag = ScenarioTag {
        x_p_m: None,
        charge_slots: link.charge_slots,
        los_prob: link.los_prob,
        success_prob: link.success_prob,
        slot_s,
    };
    simulate_fast_tagged(tag, spec)
}

fn simulate_fast_tagged(tag: ScenarioTag, spec: &SimSpec) -> Result<SimResult> {
    if !(tag.los_prob > 0.0 && tag.success_prob > 0.0) {
        return Err(Error::Infeasible(format!(
            "link never delivers (p = {}, p_s = {})",
            tag.los_prob, tag.success_prob
        )));
    }
    if tag.charge_slots == 0 || tag.los_prob > 1.0 || tag.success_prob > 1.0 {
        return Err(Error::Domain("need K >= 1 and probabilities in (0, 1]".into()));
    }
    run_replications(spec, |r| {
        let mut rng = replication_rng(spec.seed, r);
        let mut acc = CycleAccumulator::default();
        let mut slots = 0u64;
        while acc.cycles < spec.target_cycles {
            let attempts = sampling::attempts_sample(&mut rng, tag.success_prob);
            let mut cycle = 0u64;
            for _ in 0..attempts {
                let t = negative_binomial_sample(&mut rng, tag.charge_slots, tag.los_prob);
                acc.record_attempt(t);
                cycle += t + 1;
            }
            slots += cycle;
            check_budget(spec, slots, acc.cycles)?;
            acc.record_cycle(cycle);
        }
        Ok(acc.finish(SimMode::FastRenewal, spec.seed, tag))
    })
}

/// Runs whichever mode `spec` names.
pub fn simulate(config: &SystemConfig, device: &Device, x_p: f64, spec: &SimSpec) -> Result<SimResult> {
    match spec.mode {
        SimMode::ExactSlot => simulate_exact(config, device, x_p, spec),
        SimMode::FastRenewal => simulate_fast(config, device, x_p, spec),
    }
}

/// Pools replications of one scenario. Per-cycle estimators are weighted by
/// cycle count, per-attempt estimators by attempt count; standard errors
/// combine as for a weighted mean of independent estimates.
pub fn merge_replications(results: &[SimResult]) -> Result<SimResult> {
    let first = results
        .first()
        .ok_or_else(|| Error::Domain("cannot merge an empty list of results".into()))?;
    if results.len() == 1 {
        return Ok(first.clone());
    }
    if let Some(other) = results.iter().find(|r| r.scenario != first.scenario) {
        return Err(Error::MismatchedScenario(format!(
            "{:?} vs {:?}",
            first.scenario, other.scenario
        )));
    }

    let cycles: u64 = results.iter().map(|r| r.cycles).sum();
    let attempts: u64 = results.iter().map(|r| r.attempts).sum();
    let by_cycles = |value: fn(&SimResult) -> f64, se: fn(&SimResult) -> f64| {
        pool(results, |r| r.cycles as f64 / cycles as f64, value, se)
    };
    let (avg_aoi_s, aoi_se_s) = by_cycles(|r| r.avg_aoi_s, |r| r.aoi_se_s);
    let (e_s_hat, e_s_se) = by_cycles(|r| r.e_s_hat, |r| r.e_s_se);
    let (e_s2_hat, e_s2_se) = by_cycles(|r| r.e_s2_hat, |r| r.e_s2_se);
    let (e_t_hat, e_t_se) = pool(
        results,
        |r| r.attempts as f64 / attempts as f64,
        |r| r.e_t_hat,
        |r| r.e_t_se,
    );
    let p_s_hat = cycles as f64 / attempts as f64;

    Ok(SimResult {
        mode: first.mode,
        avg_aoi_s,
        ci_halfwidth_s: Z95 * aoi_se_s,
        aoi_se_s,
        e_s_hat,
        e_s_se,
        e_s2_hat,
        e_s2_se,
        e_t_hat,
        e_t_se,
        p_s_hat,
        p_s_se: (p_s_hat * (1.0 - p_s_hat) / attempts as f64).sqrt(),
        cycles,
        attempts,
        replications: results.iter().map(|r| r.replications).sum(),
        seed: first.seed,
        scenario: first.scenario,
    })
}

fn pool(
    results: &[SimResult],
    weight: impl Fn(&SimResult) -> f64,
    value: impl Fn(&SimResult) -> f64,
    se: impl Fn(&SimResult) -> f64,
) -> (f64, f64) {
    let mut mean = 0.0;
    let mut var = 0.0;
    for r in results {
        let w = weight(r);
        mean += w * value(r);
        var += w * w * se(r) * se(r);
    }
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests;
