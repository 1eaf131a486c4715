use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A nonnegative quantity that may be unbounded.
///
/// Links outside coverage (or fully blocked) never deliver an update, so
/// their moments and average age are infinite. That case is carried as a
/// value rather than an error so sweeps can cross the coverage boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Finite(f64),
    Infinite,
}

impl Metric {
    pub fn is_finite(self) -> bool {
        matches!(self, Metric::Finite(_))
    }

    /// The value as an `f64`, with `Infinite` mapped to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            Metric::Finite(v) => v,
            Metric::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Metric::Finite(v) => Some(v),
            Metric::Infinite => None,
        }
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Metric {
        match self {
            Metric::Finite(v) => Metric::Finite(f(v)),
            Metric::Infinite => Metric::Infinite,
        }
    }
}

impl PartialOrd for Metric {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Metric::Finite(a), Metric::Finite(b)) => a.partial_cmp(b),
            (Metric::Finite(_), Metric::Infinite) => Some(Ordering::Less),
            (Metric::Infinite, Metric::Finite(_)) => Some(Ordering::Greater),
            (Metric::Infinite, Metric::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Finite(v) => write!(f, "{v}"),
            Metric::Infinite => f.write_str("inf"),
        }
    }
}

// JSON has no infinity literal; the unbounded case is written as the string "inf".
impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Metric::Finite(v) => serializer.serialize_f64(*v),
            Metric::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(Metric::Finite(v)),
            Repr::Text(s) if s == "inf" => Ok(Metric::Infinite),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}
