//! Out-of-sample evaluation: mean logloss, correct classification rate,
//! loss CDF, and tail risk (CVaR) over a grid of tail levels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::{classify, logloss};
use crate::types::Dataset;

/// Tail levels evaluated by default.
pub const DEFAULT_ALPHAS: [f64; 5] = [0.05, 0.1, 0.25, 0.5, 1.0];

/// CVaR of the empirical loss distribution at one tail level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvarPoint {
    pub alpha: f64,
    pub value: f64,
}

/// Evaluation of a fitted weight vector on a held-out set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub mean_logloss: f64,
    /// Correct classification rate in [0, 1].
    pub ccr: f64,
    pub cvar: Vec<CvarPoint>,
    /// Per-sample loglosses in dataset order, kept when requested so callers
    /// can build CDFs or aggregate across runs.
    pub logloss_samples: Option<Vec<f64>>,
}

/// CVaR at level `alpha`: the mean of the worst `alpha` fraction of losses.
///
/// With M losses sorted descending and t = alpha * M, this averages the
/// first floor(t) losses plus a fractional (t - floor(t)) share of the
/// next one, normalized by t. At alpha = 1 it is exactly the mean; when
/// t < 1 it is the maximum.
pub fn cvar_from_losses(losses: &[f64], alpha: f64) -> Result<f64> {
    if losses.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(alpha.is_finite() && 0.0 < alpha && alpha <= 1.0) {
        return Err(Error::invalid(
            "alpha",
            format!("tail level must lie in (0, 1], got {alpha}"),
        ));
    }
    if losses.iter().any(|l| !l.is_finite()) {
        return Err(Error::non_finite("losses"));
    }
    let mut sorted = losses.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let t = alpha * sorted.len() as f64;
    if t <= 1.0 {
        return Ok(sorted[0]);
    }
    let whole = t.floor() as usize;
    let frac = t - whole as f64;
    let mut acc: f64 = sorted[..whole].iter().sum();
    if frac > 0.0 {
        acc += frac * sorted[whole];
    }
    Ok(acc / t)
}

/// Empirical CDF of the losses evaluated at each threshold:
/// the fraction of losses <= threshold.
pub fn loss_cdf(losses: &[f64], thresholds: &[f64]) -> Result<Vec<f64>> {
    if losses.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let count = losses.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&thr| losses.iter().filter(|&&l| l <= thr).count() as f64 / count)
        .collect())
}

/// Per-sample loglosses of `beta` over `data`, in dataset order.
pub fn logloss_samples(beta: &[f64], data: &Dataset) -> Result<Vec<f64>> {
    data.iter().map(|s| logloss(beta, s.x(), s.y())).collect()
}

/// Evaluates `beta` on `data`: mean logloss, correct classification rate,
/// and CVaR at each requested tail level. Set `keep_samples` to retain the
/// per-sample losses in the summary.
pub fn evaluate(
    beta: &[f64],
    data: &Dataset,
    alphas: &[f64],
    keep_samples: bool,
) -> Result<EvalSummary> {
    let losses = logloss_samples(beta, data)?;
    let mean_logloss = losses.iter().sum::<f64>() / losses.len() as f64;
    let correct = data
        .iter()
        .filter(|s| classify(beta, s.x()) == s.y())
        .count() as f64;
    let ccr = correct / data.len() as f64;
    let cvar = alphas
        .iter()
        .map(|&alpha| cvar_from_losses(&losses, alpha).map(|value| CvarPoint { alpha, value }))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalSummary {
        mean_logloss,
        ccr,
        cvar,
        logloss_samples: keep_samples.then_some(losses),
    })
}
