//! Feature norms and their duals.
//!
//! The transport metric may use any of the l1, l2, or l-infinity norms on
//! features. The training program and the risk reduction both constrain the
//! weight vector through the dual norm: dual(l1) = linf, dual(l2) = l2,
//! dual(linf) = l1.

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

impl NormKind {
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L1 => NormKind::Linf,
            NormKind::L2 => NormKind::L2,
            NormKind::Linf => NormKind::L1,
        }
    }

    /// Evaluates this norm on `v`.
    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            NormKind::L1 => v.iter().map(|z| z.abs()).sum(),
            NormKind::L2 => v.iter().map(|z| z * z).sum::<f64>().sqrt(),
            NormKind::Linf => v.iter().fold(0.0, |m, z| m.max(z.abs())),
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::Linf => "linf",
        })
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<NormKind, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" | "loo" | "l_inf" => Ok(NormKind::Linf),
            other => Err(Error::invalid("norm", format!("unknown norm `{other}`"))),
        }
    }
}

/// The dual norm of `v` with respect to the feature norm `norm`.
pub fn dual_norm(v: &[f64], norm: NormKind) -> f64 {
    norm.dual().eval(v)
}
