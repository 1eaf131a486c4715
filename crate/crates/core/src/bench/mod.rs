//! Sweeps, figure presets, analytic-versus-simulation comparison, and the
//! CSV/JSON writers behind the command-line tool.

pub mod compare;
pub mod format;
pub mod presets;
pub mod sweep;

pub use compare::{compare, ComparisonRecord, Verdict};
pub use presets::{run_preset, Preset, PresetOptions};
pub use sweep::{
    run_sweep, sweep_rows, AxisSpec, AxisValues, SweepAxis, SweepRow, SweepSpec, VariantSelection, CSV_HEADER,
};
