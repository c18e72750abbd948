//! Euclidean projections onto dual-norm epigraph cones, plus the norm ball
//! projections and proximal operators built from them.
//!
//! The training program constrains (beta, lambda) to the convex cone
//!
//! ```text
//! C = { (b, l) : ||b||_dual <= l }
//! ```
//!
//! where the dual pairs are l1 <-> linf and l2 <-> l2. Projection onto C is:
//!
//! * feature norm l2: the standard second-order cone projection;
//! * feature norm l1 (dual linf): water-filling over sorted magnitudes,
//!   O(n log n);
//! * feature norm linf (dual l1): obtained from the linf-epigraph projection
//!   through the Moreau cone decomposition P_K(z) = z + P_{K*}(-z), since the
//!   l1 and linf epigraph cones are mutually dual.

use crate::la::norm2;
use crate::norms::{dual_norm, NormKind};

/// Projects (beta, lambda) onto {(b, l) : dual_norm(b, norm) <= l, l >= 0}.
/// Feasible inputs are returned unchanged.
pub fn project_epigraph(beta: &[f64], lambda: f64, norm: NormKind) -> (Vec<f64>, f64) {
    if dual_norm(beta, norm) <= lambda {
        return (beta.to_vec(), lambda);
    }
    let (b, l) = match norm.dual() {
        NormKind::L2 => project_soc(beta, lambda),
        NormKind::Linf => project_linf_epigraph(beta, lambda),
        NormKind::L1 => project_l1_epigraph(beta, lambda),
    };
    // Clear rounding dust so the feasibility invariant holds exactly.
    let l = l.max(dual_norm(&b, norm)).max(0.0);
    (b, l)
}

/// Second-order cone projection of (v, s) onto {(b, l) : ||b||_2 <= l}.
fn project_soc(v: &[f64], s: f64) -> (Vec<f64>, f64) {
    let nv = norm2(v);
    if nv <= s {
        (v.to_vec(), s)
    } else if nv <= -s {
        (vec![0.0; v.len()], 0.0)
    } else {
        let a = 0.5 * (1.0 + s / nv);
        (v.iter().map(|z| a * z).collect(), 0.5 * (nv + s))
    }
}

/// Projection of (v, s) onto {(b, l) : ||b||_inf <= l}.
///
/// For fixed l the closest b clamps each coordinate to [-l, l], so l solves
/// the strictly increasing stationarity condition
/// l - s = sum_i max(|v_i| - l, 0), giving l = (s + sum of the k largest
/// magnitudes) / (1 + k) for the correct active count k.
fn project_linf_epigraph(v: &[f64], s: f64) -> (Vec<f64>, f64) {
    let mut mags: Vec<f64> = v.iter().map(|z| z.abs()).collect();
    mags.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite magnitudes"));

    let mut t = f64::NEG_INFINITY;
    let mut prefix = 0.0;
    for k in 0..=mags.len() {
        let cand = (s + prefix) / (1.0 + k as f64);
        let next = mags.get(k).copied().unwrap_or(f64::NEG_INFINITY);
        if cand >= next {
            t = cand;
            break;
        }
        prefix += mags[k];
    }
    if t <= 0.0 {
        return (vec![0.0; v.len()], 0.0);
    }
    let b = v.iter().map(|z| z.clamp(-t, t)).collect();
    (b, t)
}

/// Projection of (v, s) onto {(b, l) : ||b||_1 <= l} via the Moreau
/// decomposition against the dual (linf-epigraph) cone.
fn project_l1_epigraph(v: &[f64], s: f64) -> (Vec<f64>, f64) {
    let neg: Vec<f64> = v.iter().map(|z| -z).collect();
    let (pu, pt) = project_linf_epigraph(&neg, -s);
    let b = v.iter().zip(&pu).map(|(z, p)| z + p).collect();
    (b, s + pt)
}

/// Projection onto the l1 ball of radius `r` (sorting method).
pub fn project_l1_ball(v: &[f64], r: f64) -> Vec<f64> {
    assert!(r >= 0.0, "l1 ball radius must be nonnegative");
    if v.iter().map(|z| z.abs()).sum::<f64>() <= r {
        return v.to_vec();
    }
    if r == 0.0 {
        return vec![0.0; v.len()];
    }
    let mut mags: Vec<f64> = v.iter().map(|z| z.abs()).collect();
    mags.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite magnitudes"));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        prefix += m;
        let cand = (prefix - r) / (k + 1) as f64;
        if k + 1 == mags.len() || cand >= mags[k + 1] {
            theta = cand;
            break;
        }
    }
    v.iter()
        .map(|z| z.signum() * (z.abs() - theta).max(0.0))
        .collect()
}

/// Proximal operator of w * ||.||_p at v, where p = dual(norm):
/// soft-thresholding for an l1 penalty, radial shrinkage for l2, and the
/// Moreau complement of the l1-ball projection for an linf penalty.
pub fn prox_dual_norm(v: &[f64], w: f64, norm: NormKind) -> Vec<f64> {
    assert!(w >= 0.0, "prox weight must be nonnegative");
    if w == 0.0 {
        return v.to_vec();
    }
    match norm.dual() {
        NormKind::L1 => v
            .iter()
            .map(|z| z.signum() * (z.abs() - w).max(0.0))
            .collect(),
        NormKind::L2 => {
            let nv = norm2(v);
            if nv <= w {
                vec![0.0; v.len()]
            } else {
                let c = 1.0 - w / nv;
                v.iter().map(|z| c * z).collect()
            }
        }
        NormKind::Linf => {
            let ball = project_l1_ball(v, w);
            v.iter().zip(&ball).map(|(z, p)| z - p).collect()
        }
    }
}
