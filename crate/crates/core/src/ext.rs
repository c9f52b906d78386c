//! Positive extended reals: finite values plus a distinguished infinity.
//!
//! Used for the `p` exponent of ℓp norms, the concentration horizon `T`,
//! and the admissible confidence range `x_max`. Infinity is carried as a
//! variant, never as a large float sentinel, and serializes to the JSON
//! string `"inf"`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Inf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// Finite value, or `None` for infinity.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Inf => None,
        }
    }

    /// Collapse to `f64`, mapping `Inf` to `f64::INFINITY`. Only for
    /// arithmetic where the IEEE semantics are the intended ones.
    pub fn as_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::Inf => f64::INFINITY,
        }
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::Parse("NaN is not an extended real".into()))
        } else if v.is_infinite() {
            if v > 0.0 {
                Ok(ExtReal::Inf)
            } else {
                Err(Error::Parse("negative infinity is not supported".into()))
            }
        } else {
            Ok(ExtReal::Finite(v))
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => serializer.serialize_f64(*v),
            ExtReal::Inf => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Word(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => {
                ExtReal::from_f64(v).map_err(|e| serde::de::Error::custom(e.to_string()))
            }
            Repr::Word(w) if w == "inf" => Ok(ExtReal::Inf),
            Repr::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {w:?}"
            ))),
        }
    }
}
