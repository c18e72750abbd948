//! Core domain types: labels, samples, datasets, and the feature-label
//! transport metric parameters.
//!
//! A dataset represents the empirical distribution placing mass 1/N on each
//! of its N samples. The transport metric between points (x, y) and (x', y')
//! is
//!
//! ```text
//! d((x,y), (x',y')) = ||x - x'|| + kappa * |y - y'| / 2
//! ```
//!
//! where the feature norm is selected by [`NormKind`] and `kappa > 0` prices
//! a label flip. `kappa` may be infinite, which forbids label transport
//! entirely; the infinite case is a distinguished enum variant rather than a
//! large float so that downstream arithmetic can treat it structurally.

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::norms::NormKind;

/// Binary class label, stored strictly as +1 / -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Plus,
    Minus,
}

impl Label {
    /// The label as a signed unit float.
    pub fn signum(self) -> f64 {
        match self {
            Label::Plus => 1.0,
            Label::Minus => -1.0,
        }
    }

    /// The opposite label.
    pub fn flip(self) -> Label {
        match self {
            Label::Plus => Label::Minus,
            Label::Minus => Label::Plus,
        }
    }

    /// Maps +1.0 / -1.0 exactly; anything else is rejected.
    pub fn from_signum(v: f64) -> Result<Label> {
        if v == 1.0 {
            Ok(Label::Plus)
        } else if v == -1.0 {
            Ok(Label::Minus)
        } else {
            Err(Error::invalid(
                "label",
                format!("expected +1 or -1, got {v}"),
            ))
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(match self {
            Label::Plus => 1,
            Label::Minus => -1,
        })
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        match v {
            1 => Ok(Label::Plus),
            -1 => Ok(Label::Minus),
            _ => Err(de::Error::custom(format!(
                "label must be +1 or -1, got {v}"
            ))),
        }
    }
}

/// One observation (x, y) with x in R^n and y in {-1, +1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    x: Vec<f64>,
    y: Label,
}

impl LabeledSample {
    /// Builds a sample, rejecting non-finite feature entries.
    pub fn new(x: Vec<f64>, y: Label) -> Result<Self> {
        if let Some(j) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::non_finite(format!("feature {j}")));
        }
        Ok(LabeledSample { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> Label {
        self.y
    }
}

/// An ordered list of samples sharing one feature dimension; the empirical
/// distribution assigns mass 1/N to each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
    dim: usize,
}

impl Dataset {
    /// Builds a dataset from validated samples; requires N >= 1 and a shared
    /// feature dimension.
    pub fn new(samples: Vec<LabeledSample>) -> Result<Self> {
        let dim = match samples.first() {
            Some(s) => s.x.len(),
            None => return Err(Error::EmptyDataset),
        };
        for s in &samples {
            if s.x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.x.len(),
                });
            }
        }
        Ok(Dataset { samples, dim })
    }

    /// Convenience constructor from parallel feature/label rows.
    pub fn from_rows(features: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                got: labels.len(),
            });
        }
        let samples = features
            .into_iter()
            .zip(labels)
            .map(|(x, y)| LabeledSample::new(x, y))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledSample> {
        self.samples.iter()
    }
}

/// Label-flip weight kappa: a positive real or the structural infinity that
/// disables label transport.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Finite(f64),
    Infinite,
}

impl Kappa {
    /// Validates kappa > 0; `f64::INFINITY` maps to the structural variant.
    pub fn new(v: f64) -> Result<Kappa> {
        if v == f64::INFINITY {
            Ok(Kappa::Infinite)
        } else if v.is_finite() && v > 0.0 {
            Ok(Kappa::Finite(v))
        } else {
            Err(Error::invalid(
                "kappa",
                format!("must be positive or inf, got {v}"),
            ))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Kappa::Infinite)
    }

    /// Float view for reporting; `INFINITY` for the structural variant.
    pub fn as_f64(self) -> f64 {
        match self {
            Kappa::Finite(v) => v,
            Kappa::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Kappa {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kappa::Finite(v) => write!(f, "{v}"),
            Kappa::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Kappa {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kappa> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Kappa::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::invalid("kappa", format!("unparseable value `{s}`")))?;
        Kappa::new(v)
    }
}

// JSON encodes finite kappa as a number and the infinite variant as the
// string "inf" (JSON has no infinity literal).
impl Serialize for Kappa {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Kappa::Finite(v) => s.serialize_f64(*v),
            Kappa::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Kappa {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct KappaVisitor;

        impl Visitor<'_> for KappaVisitor {
            type Value = Kappa;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a positive number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Kappa, E> {
                Kappa::new(v).map_err(|e| E::custom(e.to_string()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Kappa, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Kappa, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Kappa, E> {
                v.parse().map_err(|e: Error| E::custom(e.to_string()))
            }
        }

        d.deserialize_any(KappaVisitor)
    }
}

/// Parameters of the feature-label transport metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub norm: NormKind,
    pub kappa: Kappa,
}

impl MetricParams {
    pub fn new(norm: NormKind, kappa: Kappa) -> Result<Self> {
        if let Kappa::Finite(v) = kappa {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(
                    "kappa",
                    format!("must be positive, got {v}"),
                ));
            }
        }
        Ok(MetricParams { norm, kappa })
    }
}
