//! Numerically safe logloss, its gradient, and the linear classifier rule.
//!
//! The per-sample loss of a weight vector beta on (x, y) is
//!
//! ```text
//! logloss(beta, x, y) = log(1 + exp(-y <beta, x>)) = softplus(-y <beta, x>)
//! ```
//!
//! computed without overflow for any finite inputs.

use crate::error::{Error, Result};
use crate::la::dot;
use crate::types::Label;

/// log(1 + exp(u)) without overflow: u + log1p(exp(-u)) for u > 0,
/// log1p(exp(u)) otherwise. Exact in both tails.
pub fn softplus(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

/// The logistic function 1 / (1 + exp(-u)), evaluated branch-wise so that
/// neither tail overflows.
pub fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// The margin y * <beta, x>; positive iff the sample is classified correctly
/// with room to spare.
pub fn margin(beta: &[f64], x: &[f64], y: Label) -> Result<f64> {
    if beta.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: beta.len(),
            got: x.len(),
        });
    }
    Ok(y.signum() * dot(beta, x))
}

/// Logloss of beta on one sample.
pub fn logloss(beta: &[f64], x: &[f64], y: Label) -> Result<f64> {
    Ok(softplus(-margin(beta, x, y)?))
}

/// Gradient of the logloss in beta: -y * logistic(-y <beta, x>) * x.
pub fn logloss_gradient(beta: &[f64], x: &[f64], y: Label) -> Result<Vec<f64>> {
    let t = margin(beta, x, y)?;
    let c = -y.signum() * logistic(-t);
    Ok(x.iter().map(|xi| c * xi).collect())
}

/// Predicted label: +1 if <beta, x> > 0 else -1. The tie <beta, x> = 0 maps
/// to -1 so that the classifier's empirical error rate coincides with the
/// indicator risk 1{y <beta, x> <= 0} used by the risk bounds.
pub fn classify(beta: &[f64], x: &[f64]) -> Label {
    assert_eq!(beta.len(), x.len(), "classify: dimension mismatch");
    if dot(beta, x) > 0.0 {
        Label::Plus
    } else {
        Label::Minus
    }
}
