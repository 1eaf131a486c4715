//! Named sweeps that regenerate the reference figures from one command.
//!
//! - `fig3`: delivery probability against antenna position for three
//!   blockage densities, plus a `_wide` companion over a 5 km waveguide where
//!   the coverage cutoff becomes visible.
//! - `fig4`: average age against blockage density at fixed antenna positions,
//!   plus an `_opt` companion with the optimized position at every density.
//! - `fig5`: average age over antenna position and capacitor size.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::sweep::{sweep_rows, write_csv, AxisSpec, AxisValues, SweepAxis, SweepRow, SweepSpec, VariantSelection};
use crate::error::Result;
use crate::model::SystemConfig;
use crate::placement::{optimize_position, Objective, PlacementSpec};
use crate::sim::SimSpec;

pub const FIG3_BETAS: [f64; 3] = [1e-5, 1e-4, 1e-3];
pub const FIG4_POSITIONS: [f64; 5] = [0.0, 5.0, 10.0, 20.0, 35.0];
pub const WIDE_LENGTH_M: f64 = 5000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3,
    Fig4,
    Fig5,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            other => Err(format!("unknown preset {other:?} (expected fig3, fig4 or fig5)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PresetOptions {
    pub variants: VariantSelection,
    pub parallel: bool,
}

impl Default for PresetOptions {
    fn default() -> Self {
        PresetOptions {
            variants: VariantSelection::Both,
            parallel: false,
        }
    }
}

/// One CSV a preset produces; `suffix` is appended to the output file stem.
#[derive(Debug, Clone)]
pub struct PresetTable {
    pub suffix: &'static str,
    pub rows: Vec<SweepRow>,
}

fn positions(config: &SystemConfig, count: usize) -> AxisValues {
    AxisValues::Range {
        start: 0.0,
        stop: config.geometry.waveguide_length_m,
        count,
    }
}

fn spec(primary: AxisSpec, secondary: AxisSpec, options: PresetOptions, sim: Option<&SimSpec>) -> SweepSpec {
    let mut s = SweepSpec::new(primary).with_secondary(secondary);
    s.variants = options.variants;
    s.parallel = options.parallel;
    s.sim = sim.cloned();
    s
}

pub fn preset_tables(
    config: &SystemConfig,
    preset: Preset,
    options: PresetOptions,
    sim: Option<&SimSpec>,
) -> Result<Vec<PresetTable>> {
    let betas = || AxisSpec {
        axis: SweepAxis::Beta,
        values: AxisValues::List(FIG3_BETAS.to_vec()),
    };
    match preset {
        Preset::Fig3 => {
            let main = spec(
                betas(),
                AxisSpec {
                    axis: SweepAxis::PaPosition,
                    values: positions(config, 141),
                },
                options,
                sim,
            );
            // Only the lightest blockage keeps p above zero far enough out to
            // reach the coverage edge.
            let mut wide_config = config.clone();
            wide_config.geometry.waveguide_length_m = WIDE_LENGTH_M;
            wide_config.geometry.area_x_m = wide_config.geometry.area_x_m.max(WIDE_LENGTH_M);
            let wide = spec(
                AxisSpec {
                    axis: SweepAxis::Beta,
                    values: AxisValues::List(vec![FIG3_BETAS[0]]),
                },
                AxisSpec {
                    axis: SweepAxis::PaPosition,
                    values: positions(&wide_config, 501),
                },
                options,
                None,
            );
            Ok(vec![
                PresetTable {
                    suffix: "",
                    rows: sweep_rows(config, &main)?,
                },
                PresetTable {
                    suffix: "_wide",
                    rows: sweep_rows(&wide_config, &wide)?,
                },
            ])
        }
        Preset::Fig4 => {
            let length = config.geometry.waveguide_length_m;
            let fixed: Vec<f64> = FIG4_POSITIONS.iter().copied().filter(|&x| x <= length).collect();
            let beta_axis = AxisSpec {
                axis: SweepAxis::Beta,
                values: AxisValues::log_spaced(1e-5, 1e-3, 21),
            };
            let main = spec(
                AxisSpec {
                    axis: SweepAxis::PaPosition,
                    values: AxisValues::List(fixed),
                },
                beta_axis.clone(),
                options,
                sim,
            );
            let mut optimized = Vec::new();
            for beta in beta_axis.values.expand()? {
                let mut point = config.clone();
                point.rf.blockage_beta = beta;
                let placement = PlacementSpec {
                    grid_step_m: 0.1,
                    refine_rounds: 2,
                    objective: Objective::SingleDevice,
                    variant: crate::analytic::ModelVariant::CorrectedCompound,
                    seed_device_positions: true,
                    parallel: options.parallel,
                };
                let best = optimize_position(&point, &placement)?;
                optimized.push(super::sweep::evaluate_point(
                    &point,
                    0,
                    best.x_p_star_m,
                    options.variants,
                    None,
                )?);
            }
            Ok(vec![
                PresetTable {
                    suffix: "",
                    rows: sweep_rows(config, &main)?,
                },
                PresetTable {
                    suffix: "_opt",
                    rows: optimized,
                },
            ])
        }
        Preset::Fig5 => {
            let capacitors: Vec<f64> = (-10..=-3).map(|e| 2f64.powi(e)).collect();
            let main = spec(
                AxisSpec {
                    axis: SweepAxis::PaPosition,
                    values: positions(config, 71),
                },
                AxisSpec {
                    axis: SweepAxis::Capacitor,
                    values: AxisValues::List(capacitors),
                },
                options,
                sim,
            );
            Ok(vec![PresetTable {
                suffix: "",
                rows: sweep_rows(config, &main)?,
            }])
        }
    }
}

/// `out.csv` with suffix `_wide` becomes `out_wide.csv`.
pub fn companion_path(out_path: &Path, suffix: &str) -> PathBuf {
    if suffix.is_empty() {
        return out_path.to_path_buf();
    }
    let stem = out_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match out_path.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    out_path.with_file_name(name)
}

/// Writes every table of the preset; returns each path with its row count.
pub fn run_preset(
    config: &SystemConfig,
    preset: Preset,
    options: PresetOptions,
    sim: Option<&SimSpec>,
    out_path: &Path,
) -> Result<Vec<(PathBuf, usize)>> {
    let tables = preset_tables(config, preset, options, sim)?;
    let mut written = Vec::new();
    for table in tables {
        let path = companion_path(out_path, table.suffix);
        write_csv(File::create(&path)?, &table.rows)?;
        written.push((path, table.rows.len()));
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::paper_default;

    #[test]
    fn companion_names() {
        assert_eq!(
            companion_path(Path::new("out/fig3.csv"), "_wide"),
            PathBuf::from("out/fig3_wide.csv")
        );
        assert_eq!(companion_path(Path::new("fig4"), "_opt"), PathBuf::from("fig4_opt"));
        assert_eq!(companion_path(Path::new("a.csv"), ""), PathBuf::from("a.csv"));
    }

    #[test]
    fn table_sizes() {
        let config = paper_default();
        let sizes = |p| {
            preset_tables(&config, p, PresetOptions::default(), None)
                .unwrap()
                .iter()
                .map(|t| (t.suffix, t.rows.len()))
                .collect::<Vec<_>>()
        };
        assert_eq!(sizes(Preset::Fig3), vec![("", 423), ("_wide", 501)]);
        assert_eq!(sizes(Preset::Fig4), vec![("", 105), ("_opt", 21)]);
        assert_eq!(sizes(Preset::Fig5), vec![("", 568)]);
    }

    #[test]
    fn wide_table_shows_the_coverage_cutoff() {
        let tables = preset_tables(&paper_default(), Preset::Fig3, PresetOptions::default(), None).unwrap();
        let wide = &tables[1].rows;
        let cut = wide
            .iter()
            .position(|r| r.success_prob == 0.0)
            .expect("cutoff inside 5 km");
        assert!(wide[cut - 1].success_prob > 0.0);
        assert!(wide[cut..]
            .iter()
            .all(|r| r.success_prob == 0.0 && r.aoi_corrected_s == Some(crate::Metric::Infinite)));
        assert!(wide[..cut]
            .iter()
            .all(|r| r.aoi_corrected_s.unwrap().value().is_finite()));
    }
}
