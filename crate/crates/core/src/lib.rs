//! Average Age of Information for a wireless-powered IoT link served by a
//! pinching antenna that slides along a dielectric waveguide.
//!
//! - [`model`]: geometry, probabilistic LoS channel, energy harvesting, delivery probability
//! - [`analytic`]: renewal moments and the closed-form average age
//! - [`sim`]: seeded Monte-Carlo simulation of the harvest-then-transmit cycle
//! - [`placement`]: antenna position search for one or many devices
//! - [`bench`]: parameter sweeps, analytic/simulation comparison, CSV and JSON output

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Oracle values in tests keep every digit they were computed with.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod analytic;
pub mod bench;
pub mod config;
pub mod error;
pub mod metric;
pub mod model;
mod par;
pub mod placement;
pub mod sim;

pub use analytic::{average_aoi, ModelVariant, RenewalMoments, RenewalParams};
pub use config::{load_config, paper_default};
pub use error::{Error, Result};
pub use metric::Metric;
pub use model::{Device, LinkBudget, SystemConfig};
pub use sim::{SimMode, SimResult, SimSpec};
