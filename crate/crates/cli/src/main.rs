//! Command-line front end: link analysis, sweeps and figure presets,
//! Monte-Carlo runs, antenna placement and model comparison.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pa_aoi::analytic::{average_aoi, ModelVariant};
use pa_aoi::bench::compare::{compare, write_json};
use pa_aoi::bench::presets::{run_preset, Preset, PresetOptions};
use pa_aoi::bench::sweep::{sweep_rows, write_csv, AxisSpec, AxisValues, SweepAxis, SweepSpec, VariantSelection};
use pa_aoi::config::config_digest;
use pa_aoi::placement::{fixed_antenna_baseline, optimize_position, Objective, PlacementSpec};
use pa_aoi::sim::{simulate, SimMode, SimSpec};
use pa_aoi::{load_config, paper_default, Error, LinkBudget, Metric, Result, SystemConfig};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "pa-aoi",
    version,
    about = "Age of information for pinching-antenna powered IoT links"
)]
struct Cli {
    /// Scenario JSON; the bundled reference scenario when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted (required for presets).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Closed forms to report.
    #[arg(long, global = true, default_value = "both")]
    variant: VariantSelection,
    /// Evaluate points or replications on all cores. Output is unchanged.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Link budget and average age at one antenna position.
    Analyze(PointArgs),
    /// Parameter sweep to CSV, either a named preset or explicit axes.
    Sweep(SweepArgs),
    /// Monte-Carlo estimate of the average age.
    Simulate(SimulateArgs),
    /// Search the waveguide for the age-minimizing antenna position.
    Optimize(OptimizeArgs),
    /// Closed forms against simulation, with a verdict on the second moment.
    Compare(CompareArgs),
}

#[derive(Args)]
struct PointArgs {
    /// Antenna position in metres; defaults to the device's x clamped to the waveguide.
    #[arg(long = "x-p")]
    x_p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    device: usize,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value = "fast")]
    mode: SimMode,
    #[arg(long, default_value_t = 10_000)]
    cycles: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replications: u32,
    /// Abort a replication after this many slots.
    #[arg(long = "max-slots")]
    max_slots: Option<u64>,
}

impl SimArgs {
    fn spec(&self, parallel: bool) -> SimSpec {
        SimSpec {
            mode: self.mode,
            target_cycles: self.cycles,
            max_slots: self.max_slots,
            seed: self.seed,
            replications: self.replications,
            parallel,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, conflicts_with_all = ["axis", "axis2"])]
    preset: Option<Preset>,
    /// pa_position, beta or capacitor.
    #[arg(long, required_unless_present = "preset")]
    axis: Option<SweepAxis>,
    /// START:STOP:COUNT, evenly spaced.
    #[arg(long, conflicts_with = "values")]
    range: Option<String>,
    /// Comma-separated explicit values.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[arg(long)]
    axis2: Option<SweepAxis>,
    #[arg(long, conflicts_with = "values2")]
    range2: Option<String>,
    #[arg(long, value_delimiter = ',')]
    values2: Option<Vec<f64>>,
    /// Antenna position when no axis sweeps it.
    #[arg(long = "x-p")]
    x_p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    device: usize,
    /// Co-run this many fast-renewal cycles at every point.
    #[arg(long = "sim-cycles")]
    sim_cycles: Option<u64>,
    #[arg(long = "sim-mode", default_value = "fast")]
    sim_mode: SimMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, default_value = "single")]
    objective: Objective,
    /// Coarse grid step in metres; 1 % of the waveguide when omitted.
    #[arg(long = "grid-step")]
    grid_step: Option<f64>,
    #[arg(long, default_value_t = 2)]
    refine: u32,
    /// Fixed antenna position to compare against.
    #[arg(long = "baseline-x", default_value_t = 0.0)]
    baseline_x: f64,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    sim: SimArgs,
}

fn parse_range(text: &str) -> Result<AxisValues> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Domain(format!("range {text:?} is not START:STOP:COUNT"));
    let [start, stop, count] = parts.as_slice() else {
        return Err(bad());
    };
    Ok(AxisValues::Range {
        start: start.trim().parse().map_err(|_| bad())?,
        stop: stop.trim().parse().map_err(|_| bad())?,
        count: count.trim().parse().map_err(|_| bad())?,
    })
}

fn axis_values(range: &Option<String>, values: &Option<Vec<f64>>, flag: &str) -> Result<AxisValues> {
    match (range, values) {
        (Some(r), _) => parse_range(r),
        (None, Some(v)) => Ok(AxisValues::List(v.clone())),
        (None, None) => Err(Error::Domain(format!(
            "--{flag} needs --range{suffix} or --values{suffix}",
            suffix = &flag[4..]
        ))),
    }
}

fn device_position(config: &SystemConfig, device: usize, x_p: Option<f64>) -> Result<f64> {
    let d = config
        .devices
        .get(device)
        .ok_or_else(|| Error::Domain(format!("no device with index {device}")))?;
    Ok(x_p.unwrap_or_else(|| d.x_m.clamp(0.0, config.geometry.waveguide_length_m)))
}

/// `both` has no meaning for a single objective; it falls back to the
/// corrected form.
fn single_variant(selection: VariantSelection) -> ModelVariant {
    match selection {
        VariantSelection::Paper => ModelVariant::PaperClosedForm,
        _ => ModelVariant::CorrectedCompound,
    }
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    match out {
        Some(path) => write_json(File::create(path)?, value),
        None => write_json(io::stdout().lock(), value),
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => paper_default(),
    };
    let out = cli.out.as_deref();
    match cli.command {
        Command::Analyze(args) => {
            let x_p = device_position(&config, args.device, args.x_p)?;
            let budget = LinkBudget::evaluate(&config, &config.devices[args.device], x_p)?;
            let link = budget.renewal();
            let aoi = |v| {
                cli.variant
                    .includes(v)
                    .then(|| average_aoi(&link, config.energy.slot_s, v))
            };
            emit_json(
                out,
                &json!({
                    "config_digest": config_digest(&config),
                    "x_p_m": x_p,
                    "device_index": args.device,
                    "link": budget,
                    "aoi_paper_s": aoi(ModelVariant::PaperClosedForm),
                    "aoi_corrected_s": aoi(ModelVariant::CorrectedCompound),
                }),
            )
        }
        Command::Sweep(args) => {
            let sim = args.sim_cycles.map(|n| SimSpec {
                parallel: false,
                ..SimSpec::new(args.sim_mode, n, args.seed)
            });
            if let Some(preset) = args.preset {
                let out = out.ok_or_else(|| Error::Domain("--preset needs --out".into()))?;
                let options = PresetOptions {
                    variants: cli.variant,
                    parallel: cli.parallel,
                };
                for (path, rows) in run_preset(&config, preset, options, sim.as_ref(), out)? {
                    eprintln!("wrote {rows} rows to {}", path.display());
                }
                return Ok(());
            }
            let axis = args.axis.expect("clap enforces --axis without --preset");
            let mut spec = SweepSpec::new(AxisSpec {
                axis,
                values: axis_values(&args.range, &args.values, "axis")?,
            });
            if let Some(axis2) = args.axis2 {
                spec = spec.with_secondary(AxisSpec {
                    axis: axis2,
                    values: axis_values(&args.range2, &args.values2, "axis2")?,
                });
            }
            spec.sim = sim;
            spec.device_index = args.device;
            spec.base_x_p_m = args.x_p;
            spec.variants = cli.variant;
            spec.parallel = cli.parallel;
            let rows = sweep_rows(&config, &spec)?;
            match out {
                Some(path) => write_csv(File::create(path)?, &rows)?,
                None => write_csv(io::stdout().lock(), &rows)?,
            }
            Ok(())
        }
        Command::Simulate(args) => {
            let x_p = device_position(&config, args.point.device, args.point.x_p)?;
            let result = simulate(
                &config,
                &config.devices[args.point.device],
                x_p,
                &args.sim.spec(cli.parallel),
            )?;
            emit_json(out, &serde_json::to_value(result)?)
        }
        Command::Optimize(args) => {
            let mut spec = PlacementSpec::for_config(&config);
            spec.objective = args.objective;
            spec.grid_step_m = args.grid_step.unwrap_or(spec.grid_step_m);
            spec.refine_rounds = args.refine;
            spec.variant = single_variant(cli.variant);
            spec.parallel = cli.parallel;
            let best = optimize_position(&config, &spec)?;
            let fixed = fixed_antenna_baseline(&config, &spec, args.baseline_x)?;
            let ratio = match (fixed.aoi_star_s, best.aoi_star_s) {
                (Metric::Finite(a), Metric::Finite(b)) => Metric::Finite(a / b),
                _ => Metric::Infinite,
            };
            emit_json(
                out,
                &json!({
                    "config_digest": config_digest(&config),
                    "objective": format!("{:?}", spec.objective),
                    "variant": spec.variant.name(),
                    "grid_step_m": spec.grid_step_m,
                    "optimum": best,
                    "baseline": { "x_fixed_m": args.baseline_x, "result": fixed },
                    "baseline_ratio": ratio,
                }),
            )
        }
        Command::Compare(args) => {
            let x_p = device_position(&config, args.point.device, args.point.x_p)?;
            let record = compare(&config, args.point.device, x_p, &args.sim.spec(cli.parallel))?;
            emit_json(out, &serde_json::to_value(record)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let _ = writeln!(io::stderr(), "error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
