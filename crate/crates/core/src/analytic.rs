//! Renewal moments of the harvest-then-transmit cycle and the closed-form
//! average age of information.
//!
//! A delivery cycle is `S = sum_{i=1..M} (T_i + 1)` slots, where each charge
//! time `T_i` is negative binomial (K LoS slots at per-slot probability `p`)
//! and the attempt count `M` is geometric in the delivery probability `p_s`.
//! The average age is `(dt / 2) (E[S^2] / E[S] + 1)`.
//!
//! Two forms of `E[S^2]` are provided. [`ModelVariant::PaperClosedForm`] uses
//! `E[T^2] E[M] + (1 + E[T])^2 E[M^2]`; [`ModelVariant::CorrectedCompound`]
//! uses the compound-sum identity `Var(T) E[M] + (1 + E[T])^2 E[M^2]`. They
//! differ by exactly `K^2 / (p^2 p_s)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::metric::Metric;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelVariant {
    PaperClosedForm,
    #[default]
    CorrectedCompound,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 2] = [ModelVariant::PaperClosedForm, ModelVariant::CorrectedCompound];

    pub fn name(self) -> &'static str {
        match self {
            ModelVariant::PaperClosedForm => "PaperClosedForm",
            ModelVariant::CorrectedCompound => "CorrectedCompound",
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" | "PaperClosedForm" => Ok(ModelVariant::PaperClosedForm),
            "corrected" | "CorrectedCompound" => Ok(ModelVariant::CorrectedCompound),
            other => Err(format!("unknown model variant {other:?} (expected paper or corrected)")),
        }
    }
}

/// The three numbers the renewal analysis depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenewalParams {
    /// LoS slots needed to fill the capacitor (K).
    pub charge_slots: u64,
    /// Per-slot LoS probability (p).
    pub los_prob: f64,
    /// Per-attempt delivery probability (p_s).
    pub success_prob: f64,
}

impl RenewalParams {
    pub fn new(charge_slots: u64, los_prob: f64, success_prob: f64) -> Self {
        RenewalParams {
            charge_slots,
            los_prob,
            success_prob,
        }
    }

    fn k(&self) -> f64 {
        self.charge_slots as f64
    }

    fn feasible(&self) -> bool {
        self.los_prob > 0.0 && self.success_prob > 0.0
    }
}

/// E[T] = K / p.
pub fn expected_charge_slots(link: &RenewalParams) -> Metric {
    if link.los_prob > 0.0 {
        Metric::Finite(link.k() / link.los_prob)
    } else {
        Metric::Infinite
    }
}

/// E[T^2] = K (1 - p) / p^2 + (K / p)^2.
pub fn expected_charge_slots_sq(link: &RenewalParams) -> Metric {
    let (k, p) = (link.k(), link.los_prob);
    if p > 0.0 {
        Metric::Finite(k * (1.0 - p) / (p * p) + (k / p) * (k / p))
    } else {
        Metric::Infinite
    }
}

/// (E[M], E[M^2]) for the geometric attempt count.
pub fn attempt_moments(success_prob: f64) -> (Metric, Metric) {
    if success_prob > 0.0 {
        let ps = success_prob;
        (Metric::Finite(1.0 / ps), Metric::Finite((2.0 - ps) / (ps * ps)))
    } else {
        (Metric::Infinite, Metric::Infinite)
    }
}

/// E[S] = (p + K) / (p p_s).
pub fn expected_cycle(link: &RenewalParams) -> Metric {
    if !link.feasible() {
        return Metric::Infinite;
    }
    let (k, p, ps) = (link.k(), link.los_prob, link.success_prob);
    Metric::Finite((p + k) / (p * ps))
}

pub fn expected_cycle_sq(link: &RenewalParams, variant: ModelVariant) -> Metric {
    if !link.feasible() {
        return Metric::Infinite;
    }
    let (k, p, ps) = (link.k(), link.los_prob, link.success_prob);
    let first = match variant {
        ModelVariant::PaperClosedForm => k * (1.0 - p + k) / (p * p * ps),
        ModelVariant::CorrectedCompound => k * (1.0 - p) / (p * p * ps),
    };
    Metric::Finite(first + (p + k) * (p + k) * (2.0 - ps) / (p * p * ps * ps))
}

/// E[S^2] / E[S], reduced so that it stays finite when `p` is tiny enough
/// for the squared moments themselves to overflow.
fn cycle_moment_ratio(link: &RenewalParams, variant: ModelVariant) -> f64 {
    let (k, p, ps) = (link.k(), link.los_prob, link.success_prob);
    let first = match variant {
        ModelVariant::PaperClosedForm => k * (1.0 - p + k),
        ModelVariant::CorrectedCompound => k * (1.0 - p),
    } / (p * (p + k));
    first + (p + k) * (2.0 - ps) / (p * ps)
}

/// Time-average age in seconds, `(dt / 2) (E[S^2] / E[S] + 1)`.
pub fn average_aoi(link: &RenewalParams, slot_s: f64, variant: ModelVariant) -> Metric {
    if !link.feasible() {
        return Metric::Infinite;
    }
    Metric::Finite(0.5 * slot_s * (cycle_moment_ratio(link, variant) + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenewalMoments {
    pub e_t: f64,
    pub e_t2: f64,
    pub e_m: f64,
    pub e_m2: f64,
    pub e_s: f64,
    pub e_s2: f64,
    pub variant: ModelVariant,
}

impl RenewalMoments {
    /// All six moments, or `None` when the link never delivers.
    pub fn compute(link: &RenewalParams, variant: ModelVariant) -> Option<Self> {
        let (e_m, e_m2) = attempt_moments(link.success_prob);
        Some(RenewalMoments {
            e_t: expected_charge_slots(link).finite()?,
            e_t2: expected_charge_slots_sq(link).finite()?,
            e_m: e_m.finite()?,
            e_m2: e_m2.finite()?,
            e_s: expected_cycle(link).finite()?,
            e_s2: expected_cycle_sq(link, variant).finite()?,
            variant,
        })
    }

    pub fn average_aoi(&self, slot_s: f64) -> f64 {
        0.5 * slot_s * (self.e_s2 / self.e_s + 1.0)
    }
}
