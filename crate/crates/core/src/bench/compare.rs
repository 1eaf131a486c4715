//! Side-by-side closed forms and simulation for one antenna position, with a
//! verdict on which second-moment form the simulation supports.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::analytic::{average_aoi, expected_cycle, expected_cycle_sq, ModelVariant};
use crate::config::config_digest;
use crate::error::{Error, Result};
use crate::model::{LinkBudget, SystemConfig};
use crate::sim::{self, SimResult, SimSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Supports(ModelVariant),
    Inconclusive,
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Supports(v) => serializer.serialize_str(v.name()),
            Verdict::Inconclusive => serializer.serialize_str("inconclusive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantValues {
    pub charge_slots: u64,
    pub los_prob: f64,
    pub success_prob: f64,
    pub e_s: f64,
    pub e_s2_paper: f64,
    pub e_s2_corrected: f64,
    pub aoi_paper_s: f64,
    pub aoi_corrected_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub config_digest: String,
    pub x_p_m: f64,
    pub device_index: usize,
    pub variant_values: VariantValues,
    pub sim: SimResult,
    /// Variants whose `E[S^2]` lies inside the simulated 95 % interval.
    pub covered: Vec<ModelVariant>,
    pub verdict: Verdict,
    pub seed: u64,
}

/// The verdict names a variant only when the interval covers it alone.
pub fn verdict_for(sim: &SimResult, values: &VariantValues) -> (Vec<ModelVariant>, Verdict) {
    let (lo, hi) = sim.e_s2_ci();
    let covered: Vec<_> = [
        (ModelVariant::PaperClosedForm, values.e_s2_paper),
        (ModelVariant::CorrectedCompound, values.e_s2_corrected),
    ]
    .into_iter()
    .filter(|(_, v)| lo <= *v && *v <= hi)
    .map(|(variant, _)| variant)
    .collect();
    let verdict = match covered.as_slice() {
        [only] => Verdict::Supports(*only),
        _ => Verdict::Inconclusive,
    };
    (covered, verdict)
}

pub fn compare(config: &SystemConfig, device_index: usize, x_p: f64, spec: &SimSpec) -> Result<ComparisonRecord> {
    let device = config
        .devices
        .get(device_index)
        .ok_or_else(|| Error::Domain(format!("no device with index {device_index}")))?;
    let budget = LinkBudget::evaluate(config, device, x_p)?;
    if budget.success_prob == 0.0 {
        return Err(Error::Infeasible(format!(
            "delivery probability is zero at x_p = {x_p} m"
        )));
    }
    let link = budget.renewal();
    let slot_s = config.energy.slot_s;
    let values = VariantValues {
        charge_slots: budget.charge_slots,
        los_prob: budget.los_prob,
        success_prob: budget.success_prob,
        e_s: expected_cycle(&link).value(),
        e_s2_paper: expected_cycle_sq(&link, ModelVariant::PaperClosedForm).value(),
        e_s2_corrected: expected_cycle_sq(&link, ModelVariant::CorrectedCompound).value(),
        aoi_paper_s: average_aoi(&link, slot_s, ModelVariant::PaperClosedForm).value(),
        aoi_corrected_s: average_aoi(&link, slot_s, ModelVariant::CorrectedCompound).value(),
    };
    let sim = sim::simulate(config, device, x_p, spec)?;
    let (covered, verdict) = verdict_for(&sim, &values);
    Ok(ComparisonRecord {
        config_digest: config_digest(config),
        x_p_m: x_p,
        device_index,
        variant_values: values,
        sim,
        covered,
        verdict,
        seed: spec.seed,
    })
}

pub fn write_json<W: Write, T: Serialize>(mut writer: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value)?;
    writeln!(writer)?;
    Ok(())
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_json(File::create(path)?, value)
}
