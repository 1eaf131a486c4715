//! Antenna position search along the waveguide.
//!
//! The average age is piecewise constant in distance (the charge-slot count
//! is a ceiling) and drops to infinity at the coverage edge, so the search is
//! an exhaustive grid followed by local refinement rather than anything
//! derivative-based.
//!
//! Refinement round `r` evaluates multiples of `grid_step / 10^r` within one
//! previous step of the incumbent. Positions are always computed as
//! `(i * grid_step) / 10^r`, so a grid with half the step contains every point
//! of the coarser grid bit for bit.

use std::collections::HashSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{average_aoi, ModelVariant};
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::model::{LinkBudget, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// Age of the first device, on the undivided band.
    SingleDevice,
    SumAoI,
    MaxAoI,
    WeightedSum,
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(Objective::SingleDevice),
            "sum" => Ok(Objective::SumAoI),
            "max" => Ok(Objective::MaxAoI),
            "wsum" => Ok(Objective::WeightedSum),
            other => Err(format!(
                "unknown objective {other:?} (expected single, sum, max or wsum)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementSpec {
    pub grid_step_m: f64,
    pub refine_rounds: u32,
    pub objective: Objective,
    pub variant: ModelVariant,
    /// Also evaluate each device's own x-coordinate (clamped to the
    /// waveguide), where its distance is smallest.
    pub seed_device_positions: bool,
    #[serde(default)]
    pub parallel: bool,
}

impl PlacementSpec {
    /// Single-device search with a step of 1 % of the waveguide length and two refinement rounds.
    pub fn for_config(config: &SystemConfig) -> Self {
        PlacementSpec {
            grid_step_m: 0.01 * config.geometry.waveguide_length_m,
            refine_rounds: 2,
            objective: Objective::SingleDevice,
            variant: ModelVariant::default(),
            seed_device_positions: true,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub x_p_m: f64,
    pub objective: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementResult {
    pub x_p_star_m: f64,
    pub aoi_star_s: Metric,
    pub per_device_aoi_s: Vec<Metric>,
    pub evaluations: usize,
    #[serde(skip)]
    pub log: Vec<Evaluation>,
}

/// Splits an N-device deployment into N point-to-point links, each on an
/// equal `B / N` share of the band and each charged at full power.
pub fn fdma_decompose(config: &SystemConfig) -> Vec<SystemConfig> {
    let n = config.devices.len() as f64;
    config
        .devices
        .iter()
        .map(|device| {
            let mut single = config.clone();
            single.devices = vec![device.clone()];
            single.comm.bandwidth_hz = config.comm.bandwidth_hz / n;
            single
        })
        .collect()
}

/// The per-device links an objective is evaluated on.
struct ObjectiveModel {
    links: Vec<SystemConfig>,
    weights: Vec<f64>,
    objective: Objective,
    variant: ModelVariant,
}

impl ObjectiveModel {
    fn new(config: &SystemConfig, objective: Objective, variant: ModelVariant) -> Result<Self> {
        if config.devices.is_empty() {
            return Err(Error::Domain("placement needs at least one device".into()));
        }
        let links = match objective {
            Objective::SingleDevice => {
                let mut single = config.clone();
                single.devices.truncate(1);
                vec![single]
            }
            _ => fdma_decompose(config),
        };
        let weights = links.iter().map(|l| l.devices[0].weight).collect();
        Ok(ObjectiveModel {
            links,
            weights,
            objective,
            variant,
        })
    }

    fn per_device(&self, x_p: f64) -> Result<Vec<Metric>> {
        self.links
            .iter()
            .map(|link| {
                let budget = LinkBudget::evaluate(link, &link.devices[0], x_p)?;
                Ok(average_aoi(&budget.renewal(), link.energy.slot_s, self.variant))
            })
            .collect()
    }

    fn aggregate(&self, per_device: &[Metric]) -> Metric {
        let sum = |weighted: bool| {
            let mut total = 0.0;
            for (aoi, w) in per_device.iter().zip(&self.weights) {
                let w = if weighted { *w } else { 1.0 };
                if w == 0.0 {
                    continue;
                }
                match aoi {
                    Metric::Finite(v) => total += w * v,
                    Metric::Infinite => return Metric::Infinite,
                }
            }
            Metric::Finite(total)
        };
        match self.objective {
            Objective::SingleDevice => per_device[0],
            Objective::SumAoI => sum(false),
            Objective::WeightedSum => sum(true),
            Objective::MaxAoI => per_device
                .iter()
                .copied()
                .fold(Metric::Finite(0.0), |a, b| if b > a { b } else { a }),
        }
    }

    fn evaluate(&self, x_p: f64) -> Result<Metric> {
        Ok(self.aggregate(&self.per_device(x_p)?))
    }

    /// Weighted mean device x-coordinate, used to break ties on plateaus.
    fn centroid(&self) -> f64 {
        let devices = self.links.iter().map(|l| &l.devices[0]);
        let total: f64 = self.weights.iter().sum();
        if total > 0.0 {
            devices.zip(&self.weights).map(|(d, w)| w * d.x_m).sum::<f64>() / total
        } else {
            devices.map(|d| d.x_m).sum::<f64>() / self.links.len() as f64
        }
    }
}

/// True when `a` should replace the incumbent `b`.
fn better(a: &Evaluation, b: &Evaluation, centroid: f64) -> bool {
    if a.objective != b.objective {
        return a.objective < b.objective;
    }
    let (da, db) = ((a.x_p_m - centroid).abs(), (b.x_p_m - centroid).abs());
    if da != db {
        return da < db;
    }
    a.x_p_m < b.x_p_m
}

fn lattice_points(step: f64, scale: f64, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let first = (lo * scale / step).ceil().max(0.0) as u64;
    let last = (hi * scale / step).floor().max(0.0) as u64;
    (first..=last)
        .map(move |i| (i as f64 * step) / scale)
        .filter(move |&x| x >= lo && x <= hi)
}

pub fn optimize_position(config: &SystemConfig, spec: &PlacementSpec) -> Result<PlacementResult> {
    let length = config.geometry.waveguide_length_m;
    let h = spec.grid_step_m;
    if !(h > 0.0 && h <= length) {
        return Err(Error::Domain(format!("grid step must lie in (0, {length}], got {h}")));
    }
    let model = ObjectiveModel::new(config, spec.objective, spec.variant)?;
    let centroid = model.centroid();

    let mut seen = HashSet::new();
    let mut log: Vec<Evaluation> = Vec::new();
    let mut run = |points: Vec<f64>, log: &mut Vec<Evaluation>| -> Result<()> {
        let fresh: Vec<f64> = points.into_iter().filter(|x| seen.insert(x.to_bits())).collect();
        let values = crate::par::map_indexed(fresh.len(), spec.parallel, |i| model.evaluate(fresh[i]));
        for (x, v) in fresh.iter().zip(values) {
            log.push(Evaluation {
                x_p_m: *x,
                objective: v?,
            });
        }
        Ok(())
    };

    let mut initial: Vec<f64> = lattice_points(h, 1.0, 0.0, length).collect();
    initial.push(length);
    if spec.seed_device_positions {
        initial.extend(model.links.iter().map(|l| l.devices[0].x_m.clamp(0.0, length)));
    }
    run(initial, &mut log)?;

    let best_of = |log: &[Evaluation]| {
        log.iter()
            .copied()
            .reduce(|b, e| if better(&e, &b, centroid) { e } else { b })
            .expect("non-empty grid")
    };

    for round in 1..=spec.refine_rounds {
        let incumbent = best_of(&log);
        if !incumbent.objective.is_finite() {
            break;
        }
        let scale = 10f64.powi(round as i32);
        let reach = h / 10f64.powi(round as i32 - 1);
        let lo = (incumbent.x_p_m - reach).max(0.0);
        let hi = (incumbent.x_p_m + reach).min(length);
        run(lattice_points(h, scale, lo, hi).collect(), &mut log)?;
    }

    let best = best_of(&log);
    if !best.objective.is_finite() {
        return Err(Error::Infeasible(
            "average age is unbounded at every evaluated position".into(),
        ));
    }
    Ok(PlacementResult {
        x_p_star_m: best.x_p_m,
        aoi_star_s: best.objective,
        per_device_aoi_s: model.per_device(best.x_p_m)?,
        evaluations: log.len(),
        log,
    })
}

/// The objective at one fixed antenna position, e.g. the feed point `x = 0`
/// of a conventional fixed antenna.
pub fn fixed_antenna_baseline(config: &SystemConfig, spec: &PlacementSpec, x_fixed_m: f64) -> Result<PlacementResult> {
    let model = ObjectiveModel::new(config, spec.objective, spec.variant)?;
    let per_device = model.per_device(x_fixed_m)?;
    let objective = model.aggregate(&per_device);
    Ok(PlacementResult {
        x_p_star_m: x_fixed_m,
        aoi_star_s: objective,
        per_device_aoi_s: per_device,
        evaluations: 1,
        log: vec![Evaluation {
            x_p_m: x_fixed_m,
            objective,
        }],
    })
}
