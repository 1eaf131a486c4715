//! Parameter sweeps over antenna position, blockage density and capacitor size.

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::format::sig12;
use crate::analytic::{average_aoi, ModelVariant};
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::model::{LinkBudget, SystemConfig};
use crate::sim::{self, SimSpec};

/// Column order of every sweep CSV.
pub const CSV_HEADER: [&str; 11] = [
    "x_p_m",
    "beta",
    "B_max_j",
    "distance_m",
    "los_prob",
    "charge_slots",
    "success_prob",
    "aoi_paper_s",
    "aoi_corrected_s",
    "aoi_mc_s",
    "mc_ci_s",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    PaPosition,
    Beta,
    Capacitor,
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pa_position" | "x_p" => Ok(SweepAxis::PaPosition),
            "beta" => Ok(SweepAxis::Beta),
            "capacitor" | "b_max" => Ok(SweepAxis::Capacitor),
            other => Err(format!(
                "unknown sweep axis {other:?} (expected pa_position, beta or capacitor)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisValues {
    List(Vec<f64>),
    /// `count` evenly spaced points from `start` to `stop` inclusive.
    Range {
        start: f64,
        stop: f64,
        count: usize,
    },
}

impl AxisValues {
    pub fn expand(&self) -> Result<Vec<f64>> {
        let values = match self {
            AxisValues::List(v) => v.clone(),
            AxisValues::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + i as f64 * (stop - start) / (n - 1) as f64)
                    .collect(),
            },
        };
        if values.is_empty() {
            return Err(Error::Domain("sweep axis has no values".into()));
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "sweep values must be finite and strictly increasing".into(),
            ));
        }
        Ok(values)
    }

    /// `count` points evenly spaced in log10 between `start` and `stop`.
    pub fn log_spaced(start: f64, stop: f64, count: usize) -> Self {
        let (a, b) = (start.log10(), stop.log10());
        let values = (0..count)
            .map(|i| {
                if i == 0 {
                    start
                } else if i + 1 == count {
                    stop
                } else {
                    10f64.powf(a + i as f64 * (b - a) / (count - 1) as f64)
                }
            })
            .collect();
        AxisValues::List(values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub axis: SweepAxis,
    pub values: AxisValues,
}

/// Which closed-form columns to fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum VariantSelection {
    Paper,
    Corrected,
    #[default]
    Both,
}

impl VariantSelection {
    pub fn includes(self, variant: ModelVariant) -> bool {
        match self {
            VariantSelection::Both => true,
            VariantSelection::Paper => variant == ModelVariant::PaperClosedForm,
            VariantSelection::Corrected => variant == ModelVariant::CorrectedCompound,
        }
    }
}

impl FromStr for VariantSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(VariantSelection::Paper),
            "corrected" => Ok(VariantSelection::Corrected),
            "both" => Ok(VariantSelection::Both),
            other => Err(format!("unknown variant {other:?} (expected paper, corrected or both)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub primary: AxisSpec,
    /// Inner axis; rows are ordered primary-major.
    pub secondary: Option<AxisSpec>,
    /// Monte-Carlo co-run at every feasible point. Point `i` uses a seed
    /// derived from `sim.seed` and `i`.
    pub sim: Option<SimSpec>,
    pub device_index: usize,
    /// Antenna position when no axis sweeps it; defaults to the device's
    /// x-coordinate clamped to the waveguide.
    pub base_x_p_m: Option<f64>,
    pub variants: VariantSelection,
    pub parallel: bool,
}

impl SweepSpec {
    pub fn new(primary: AxisSpec) -> Self {
        SweepSpec {
            primary,
            secondary: None,
            sim: None,
            device_index: 0,
            base_x_p_m: None,
            variants: VariantSelection::Both,
            parallel: false,
        }
    }

    pub fn with_secondary(mut self, secondary: AxisSpec) -> Self {
        self.secondary = Some(secondary);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x_p_m: f64,
    pub beta: f64,
    pub capacitor_j: f64,
    pub distance_m: f64,
    pub los_prob: f64,
    pub charge_slots: u64,
    pub success_prob: f64,
    pub aoi_paper_s: Option<Metric>,
    pub aoi_corrected_s: Option<Metric>,
    pub aoi_mc_s: Option<Metric>,
    pub mc_ci_s: Option<f64>,
}

impl SweepRow {
    pub fn aoi(&self, variant: ModelVariant) -> Option<Metric> {
        match variant {
            ModelVariant::PaperClosedForm => self.aoi_paper_s,
            ModelVariant::CorrectedCompound => self.aoi_corrected_s,
        }
    }

    fn record(&self) -> [String; 11] {
        let metric = |m: Option<Metric>| m.map(|m| sig12(m.value())).unwrap_or_default();
        [
            sig12(self.x_p_m),
            sig12(self.beta),
            sig12(self.capacitor_j),
            sig12(self.distance_m),
            sig12(self.los_prob),
            self.charge_slots.to_string(),
            sig12(self.success_prob),
            metric(self.aoi_paper_s),
            metric(self.aoi_corrected_s),
            metric(self.aoi_mc_s),
            self.mc_ci_s.map(sig12).unwrap_or_default(),
        ]
    }
}

/// splitmix64 finalizer, used to give each sweep point its own seed.
fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Analytic (and optionally simulated) row for one scenario and position.
pub fn evaluate_point(
    config: &SystemConfig,
    device_index: usize,
    x_p: f64,
    variants: VariantSelection,
    sim: Option<&SimSpec>,
) -> Result<SweepRow> {
    let device = config
        .devices
        .get(device_index)
        .ok_or_else(|| Error::Domain(format!("no device with index {device_index}")))?;
    let budget = LinkBudget::evaluate(config, device, x_p)?;
    let renewal = budget.renewal();
    let slot_s = config.energy.slot_s;
    let aoi = |v: ModelVariant| variants.includes(v).then(|| average_aoi(&renewal, slot_s, v));

    let (aoi_mc_s, mc_ci_s) = match sim {
        None => (None, None),
        Some(_) if budget.success_prob == 0.0 => (Some(Metric::Infinite), None),
        Some(spec) => {
            let r = sim::simulate(config, device, x_p, spec)?;
            (Some(Metric::Finite(r.avg_aoi_s)), Some(r.ci_halfwidth_s))
        }
    };

    Ok(SweepRow {
        x_p_m: x_p,
        beta: config.rf.blockage_beta,
        capacitor_j: config.energy.capacitor_j,
        distance_m: budget.distance_m,
        los_prob: budget.los_prob,
        charge_slots: budget.charge_slots,
        success_prob: budget.success_prob,
        aoi_paper_s: aoi(ModelVariant::PaperClosedForm),
        aoi_corrected_s: aoi(ModelVariant::CorrectedCompound),
        aoi_mc_s,
        mc_ci_s,
    })
}

/// All rows of a sweep, primary-major, evaluated on the rayon pool when
/// `sweep.parallel` is set. Output order never depends on scheduling.
pub fn sweep_rows(config: &SystemConfig, sweep: &SweepSpec) -> Result<Vec<SweepRow>> {
    let primary = sweep.primary.values.expand()?;
    let secondary = match &sweep.secondary {
        Some(s) => Some((s.axis, s.values.expand()?)),
        None => None,
    };
    let device = config
        .devices
        .get(sweep.device_index)
        .ok_or_else(|| Error::Domain(format!("no device with index {}", sweep.device_index)))?;
    let base_x_p = sweep
        .base_x_p_m
        .unwrap_or_else(|| device.x_m.clamp(0.0, config.geometry.waveguide_length_m));

    let inner = secondary.as_ref().map_or(1, |(_, v)| v.len());
    let total = primary.len() * inner;
    let rows = crate::par::map_indexed(total, sweep.parallel, |i| {
        let mut point = config.clone();
        let mut x_p = base_x_p;
        let mut apply = |axis: SweepAxis, value: f64| match axis {
            SweepAxis::PaPosition => x_p = value,
            SweepAxis::Beta => point.rf.blockage_beta = value,
            SweepAxis::Capacitor => point.energy.capacitor_j = value,
        };
        apply(sweep.primary.axis, primary[i / inner]);
        if let Some((axis, values)) = &secondary {
            apply(*axis, values[i % inner]);
        }
        point.validate()?;
        let sim = sweep.sim.as_ref().map(|s| SimSpec {
            seed: mix_seed(s.seed, i as u64),
            ..s.clone()
        });
        evaluate_point(&point, sweep.device_index, x_p, sweep.variants, sim.as_ref())
    });
    rows.into_iter().collect()
}

pub fn write_csv<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(CSV_HEADER)?;
    for row in rows {
        csv.write_record(row.record())?;
    }
    csv.flush()?;
    Ok(())
}

/// Evaluates the sweep and writes it as CSV; returns the number of rows.
pub fn run_sweep(config: &SystemConfig, sweep: &SweepSpec, out_path: &Path) -> Result<usize> {
    let rows = sweep_rows(config, sweep)?;
    write_csv(File::create(out_path)?, &rows)?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::paper_default;
    use crate::sim::SimMode;

    fn position_axis(count: usize) -> AxisSpec {
        AxisSpec {
            axis: SweepAxis::PaPosition,
            values: AxisValues::Range {
                start: 0.0,
                stop: 35.0,
                count,
            },
        }
    }

    #[test]
    fn range_expansion() {
        let v = AxisValues::Range {
            start: 0.0,
            stop: 35.0,
            count: 141,
        }
        .expand()
        .unwrap();
        assert_eq!(v.len(), 141);
        assert_eq!(v[40], 10.0);
        assert_eq!(v[140], 35.0);
        assert_eq!(
            AxisValues::Range {
                start: 2.0,
                stop: 9.0,
                count: 1
            }
            .expand()
            .unwrap(),
            vec![2.0]
        );
        assert!(AxisValues::List(vec![]).expand().is_err());
        assert!(AxisValues::List(vec![1.0, 1.0]).expand().is_err());
        assert!(AxisValues::List(vec![2.0, 1.0]).expand().is_err());
        let AxisValues::List(logs) = AxisValues::log_spaced(1e-5, 1e-3, 21) else {
            unreachable!()
        };
        assert_eq!((logs[0], logs[20]), (1e-5, 1e-3));
        assert!((logs[10] / 1e-4 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rows_follow_grid_order() {
        let spec = SweepSpec::new(AxisSpec {
            axis: SweepAxis::Beta,
            values: AxisValues::List(vec![1e-5, 1e-3]),
        })
        .with_secondary(position_axis(5));
        let rows = sweep_rows(&paper_default(), &spec).unwrap();
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[0].beta, 1e-5);
        assert_eq!(rows[4].x_p_m, 35.0);
        assert_eq!(rows[5].beta, 1e-3);
        assert_eq!(rows[5].x_p_m, 0.0);
    }

    #[test]
    fn csv_header_and_inf_markers() {
        let mut config = paper_default();
        config.comm.noise_w = 5e-11; // coverage edge near 21 m
        let mut spec = SweepSpec::new(position_axis(8));
        spec.sim = Some(SimSpec::new(SimMode::FastRenewal, 200, 1));
        let rows = sweep_rows(&config, &spec).unwrap();
        let mut out = Vec::new();
        write_csv(&mut out, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let mut saw_inf = false;
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 11);
            let blocked = cols[6] == "0";
            for c in &cols[7..10] {
                assert_eq!(*c == "inf", blocked, "{line}");
            }
            assert_eq!(cols[10].is_empty(), blocked);
            saw_inf |= blocked;
        }
        assert!(saw_inf);
    }

    #[test]
    fn variant_selection_blanks_columns() {
        let mut spec = SweepSpec::new(position_axis(3));
        spec.variants = VariantSelection::Paper;
        let rows = sweep_rows(&paper_default(), &spec).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.aoi_paper_s.is_some() && r.aoi_corrected_s.is_none()));
        let rec = rows[0].record();
        assert!(rec[8].is_empty() && rec[9].is_empty() && rec[10].is_empty());
    }

    #[test]
    fn invalid_points_are_errors() {
        let spec = SweepSpec::new(AxisSpec {
            axis: SweepAxis::Beta,
            values: AxisValues::List(vec![0.5, 2.0]),
        });
        assert!(matches!(sweep_rows(&paper_default(), &spec), Err(Error::Validation(_))));
        let spec = SweepSpec::new(AxisSpec {
            axis: SweepAxis::PaPosition,
            values: AxisValues::List(vec![10.0, 40.0]),
        });
        assert!(matches!(sweep_rows(&paper_default(), &spec), Err(Error::Domain(_))));
    }

    #[test]
    fn point_seeds_differ() {
        assert_ne!(mix_seed(1, 0), mix_seed(1, 1));
        assert_ne!(mix_seed(1, 0), mix_seed(2, 0));
    }
}
