//! Certified misclassification risk over a Wasserstein ball.
//!
//! For a fixed weight vector the worst-case risk sup P[y<beta,x> <= 0] and
//! best-case risk inf P[y<beta,x> < 0] over all distributions within
//! transport budget epsilon reduce to one-dimensional convex piecewise
//! linear problems in the multiplier lambda, solved exactly by evaluating
//! at every slope breakpoint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::margin;
use crate::norms::dual_norm;
use crate::types::{Dataset, Kappa, MetricParams};

/// Certified risk interval for one (beta, epsilon, metric) triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskBounds {
    pub risk_min: f64,
    pub risk_max: f64,
    /// Multiplier attaining the worst-case value.
    pub lambda_star_max: f64,
    /// Multiplier attaining the best-case value.
    pub lambda_star_min: f64,
    pub epsilon: f64,
    pub kappa: Kappa,
}

fn margins_of(beta: &[f64], data: &Dataset) -> Result<Vec<f64>> {
    data.iter().map(|s| margin(beta, s.x(), s.y())).collect()
}

/// Fraction of samples with y<beta,x> <= 0 (ties count as errors).
pub fn empirical_risk(beta: &[f64], data: &Dataset) -> Result<f64> {
    let ms = margins_of(beta, data)?;
    let hits = ms.iter().filter(|&&m| m <= 0.0).count();
    Ok(hits as f64 / ms.len() as f64)
}

fn validate_inputs(beta: &[f64], epsilon: f64) -> Result<()> {
    if beta.iter().any(|v| !v.is_finite()) {
        return Err(Error::non_finite("beta"));
    }
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::invalid(
            "epsilon",
            format!("radius must be finite and nonnegative, got {epsilon}"),
        ));
    }
    Ok(())
}

const CANDIDATE_CAP: f64 = 1e250;
const DEDUP_TOL: f64 = 1e-12;

/// Multiplier values where some per-sample piece changes slope. `flip`
/// selects the best-case orientation (margins negated). Always contains 0
/// and a synthetic value past the last breakpoint so the flat or unbounded
/// tail of the objective is sampled.
fn candidate_lambdas(margins: &[f64], b: f64, kappa: Kappa, flip: bool) -> Vec<f64> {
    let mut cands = vec![0.0];
    let mut push = |v: f64| {
        if v.is_finite() && v > 0.0 && v <= CANDIDATE_CAP {
            cands.push(v);
        }
    };
    for &m in margins {
        let e = if flip { -m } else { m };
        if e > 0.0 {
            push(b / e);
        }
        if let Kappa::Finite(k) = kappa {
            push(b / (b * k + (-e).max(0.0)));
        }
    }
    if let Kappa::Finite(k) = kappa {
        push(1.0 / k);
    }
    let max = cands.iter().cloned().fold(0.0, f64::max);
    cands.push(2.0 * max + 1.0);
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cands.dedup_by(|a, b| (*a - *b).abs() <= DEDUP_TOL * b.abs().max(1.0));
    cands
}

/// Worst-case per-sample term: max(0, 1 - (l/b)max(m,0), 1 - lk - (l/b)max(-m,0)).
/// With kappa infinite the label-flip piece is dropped; at l = 0 the first
/// nontrivial piece already evaluates to 1.
fn worst_term(m: f64, b: f64, kappa: Kappa, lambda: f64) -> f64 {
    let move_piece = 1.0 - lambda * (m.max(0.0) / b);
    let mut s = move_piece.max(0.0);
    if let Kappa::Finite(k) = kappa {
        let flip_piece = 1.0 - lambda * k - lambda * ((-m).max(0.0) / b);
        s = s.max(flip_piece);
    }
    s
}

/// Best-case per-sample term: min(1, (l/b)max(-m,0), lk + (l/b)max(m,0)).
/// This is 1 minus the worst-case term of the negated margin, written
/// without the subtraction so integer counts stay exact.
fn best_term(m: f64, b: f64, kappa: Kappa, lambda: f64) -> f64 {
    let move_piece = lambda * ((-m).max(0.0) / b);
    let mut u = move_piece.min(1.0);
    if let Kappa::Finite(k) = kappa {
        let flip_piece = lambda * k + lambda * (m.max(0.0) / b);
        u = u.min(flip_piece);
    }
    u
}

fn mean_term(margins: &[f64], b: f64, kappa: Kappa, lambda: f64, worst: bool) -> f64 {
    let sum: f64 = margins
        .iter()
        .map(|&m| {
            if worst {
                worst_term(m, b, kappa, lambda)
            } else {
                best_term(m, b, kappa, lambda)
            }
        })
        .sum();
    sum / margins.len() as f64
}

/// Supremum of P[y<beta,x> <= 0] over the ball, with its multiplier.
pub fn worst_case_risk(
    beta: &[f64],
    data: &Dataset,
    epsilon: f64,
    metric: &MetricParams,
) -> Result<(f64, f64)> {
    validate_inputs(beta, epsilon)?;
    let b = dual_norm(beta, metric.norm);
    if b == 0.0 {
        return Ok((1.0, 0.0));
    }
    let ms = margins_of(beta, data)?;
    let mut best_val = f64::INFINITY;
    let mut best_lambda = 0.0;
    for lambda in candidate_lambdas(&ms, b, metric.kappa, false) {
        let g = lambda * epsilon + mean_term(&ms, b, metric.kappa, lambda, true);
        if g < best_val {
            best_val = g;
            best_lambda = lambda;
        }
    }
    Ok((best_val, best_lambda))
}

/// Infimum of P[y<beta,x> < 0] over the ball, with its multiplier.
pub fn best_case_risk(
    beta: &[f64],
    data: &Dataset,
    epsilon: f64,
    metric: &MetricParams,
) -> Result<(f64, f64)> {
    validate_inputs(beta, epsilon)?;
    let b = dual_norm(beta, metric.norm);
    if b == 0.0 {
        return Ok((0.0, 0.0));
    }
    let ms = margins_of(beta, data)?;
    let mut best_val = f64::NEG_INFINITY;
    let mut best_lambda = 0.0;
    for lambda in candidate_lambdas(&ms, b, metric.kappa, true) {
        let u = -lambda * epsilon + mean_term(&ms, b, metric.kappa, lambda, false);
        if u > best_val {
            best_val = u;
            best_lambda = lambda;
        }
    }
    Ok((best_val, best_lambda))
}

/// Both bounds for one (beta, epsilon, metric) triple.
pub fn risk_bounds(
    beta: &[f64],
    data: &Dataset,
    epsilon: f64,
    metric: &MetricParams,
) -> Result<RiskBounds> {
    let (risk_max, lambda_star_max) = worst_case_risk(beta, data, epsilon, metric)?;
    let (risk_min, lambda_star_min) = best_case_risk(beta, data, epsilon, metric)?;
    Ok(RiskBounds {
        risk_min: risk_min.min(risk_max),
        risk_max,
        lambda_star_max,
        lambda_star_min,
        epsilon,
        kappa: metric.kappa,
    })
}
