//! Independent reimplementations used as ground truth: dense grids,
//! textbook fixed-step first-order methods, finite differences. Nothing
//! here calls into the library's solver, projection, or risk code paths;
//! shared vocabulary types (Dataset, NormKind, Kappa) are the only
//! crossover.

use drlr::{Dataset, Kappa, NormKind};

pub fn own_softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

pub fn own_logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

pub fn own_norm(v: &[f64], kind: NormKind) -> f64 {
    match kind {
        NormKind::L1 => v.iter().map(|a| a.abs()).sum(),
        NormKind::L2 => v.iter().map(|a| a * a).sum::<f64>().sqrt(),
        NormKind::Linf => v.iter().fold(0.0, |m, a| m.max(a.abs())),
    }
}

/// Central-difference gradient of an arbitrary scalar function.
pub fn fd_grad<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for j in 0..x.len() {
        probe[j] = x[j] + h;
        let up = f(&probe);
        probe[j] = x[j] - h;
        let down = f(&probe);
        probe[j] = x[j];
        g.push((up - down) / (2.0 * h));
    }
    g
}

pub fn own_soft_threshold(v: &[f64], w: f64) -> Vec<f64> {
    v.iter()
        .map(|a| {
            if *a == 0.0 {
                0.0
            } else {
                a.signum() * (a.abs() - w).max(0.0)
            }
        })
        .collect()
}

/// Euclidean projection onto the L1 ball of radius r, by bisecting the
/// shrinkage threshold theta so that sum_i (|v_i| - theta)+ = r. Monotone
/// in theta, so 200 halvings pin it to machine precision.
pub fn own_project_l1_ball(v: &[f64], r: f64) -> Vec<f64> {
    assert!(r >= 0.0);
    if v.iter().map(|a| a.abs()).sum::<f64>() <= r {
        return v.to_vec();
    }
    let shrunk_mass = |theta: f64| -> f64 { v.iter().map(|a| (a.abs() - theta).max(0.0)).sum() };
    let mut lo = 0.0;
    let mut hi = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if shrunk_mass(mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    v.iter()
        .map(|a| {
            if *a == 0.0 {
                0.0
            } else {
                a.signum() * (a.abs() - theta).max(0.0)
            }
        })
        .collect()
}

/// prox of w * ||.||_kind at v. The Linf case goes through the Moreau
/// identity prox_f(v) = v - proj onto the L1 ball of radius w.
pub fn own_prox_scaled_norm(v: &[f64], w: f64, kind: NormKind) -> Vec<f64> {
    assert!(w >= 0.0);
    match kind {
        NormKind::L1 => own_soft_threshold(v, w),
        NormKind::L2 => {
            let n = own_norm(v, NormKind::L2);
            if n <= w {
                vec![0.0; v.len()]
            } else {
                v.iter().map(|a| a * (1.0 - w / n)).collect()
            }
        }
        NormKind::Linf => {
            let proj = own_project_l1_ball(v, w);
            v.iter().zip(&proj).map(|(a, p)| a - p).collect()
        }
    }
}

fn mean_logloss_and_grad(data: &Dataset, beta: &[f64]) -> (f64, Vec<f64>) {
    let n = data.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; beta.len()];
    for s in data.iter() {
        let y = s.y().signum();
        let t: f64 = y * beta.iter().zip(s.x()).map(|(a, b)| a * b).sum::<f64>();
        loss += own_softplus(-t) / n;
        let coef = -own_logistic(-t) * y / n;
        for (g, xj) in grad.iter_mut().zip(s.x()) {
            *g += coef * xj;
        }
    }
    (loss, grad)
}

/// Smoothness bound for the mean log loss: (1/4N) sum ||x_i||_2^2.
pub fn trace_smoothness(data: &Dataset) -> f64 {
    let n = data.len() as f64;
    let sum: f64 = data
        .iter()
        .map(|s| s.x().iter().map(|v| v * v).sum::<f64>())
        .sum();
    (sum / (4.0 * n)).max(1e-12)
}

/// Fixed-step FISTA on mean logloss + weight * ||beta||_penalty, no
/// restarts and no line search, tracking the best objective seen. The
/// caller names the penalized norm directly.
pub fn fista_composite_oracle(
    data: &Dataset,
    weight: f64,
    penalty: NormKind,
    iters: usize,
) -> (Vec<f64>, f64) {
    let step = 1.0 / trace_smoothness(data);
    let dim = data.dim();
    let obj = |b: &[f64]| mean_logloss_and_grad(data, b).0 + weight * own_norm(b, penalty);
    let mut x = vec![0.0; dim];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut best = obj(&x);
    let mut best_x = x.clone();
    for _ in 0..iters {
        let (_, g) = mean_logloss_and_grad(data, &y);
        let moved: Vec<f64> = y.iter().zip(&g).map(|(a, gj)| a - step * gj).collect();
        let x_new = own_prox_scaled_norm(&moved, weight * step, penalty);
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let coef = (t - 1.0) / t_new;
        y = x_new
            .iter()
            .zip(&x)
            .map(|(a, b)| a + coef * (a - b))
            .collect();
        let v = obj(&x_new);
        if v < best {
            best = v;
            best_x = x_new.clone();
        }
        x = x_new;
        t = t_new;
    }
    (best_x, best)
}

/// Plain fixed-step gradient descent on the bare mean log loss, with an
/// early stop on a vanishing gradient.
pub fn gd_classical_oracle(data: &Dataset, iters: usize) -> (Vec<f64>, f64) {
    let step = 1.0 / trace_smoothness(data);
    let mut beta = vec![0.0; data.dim()];
    let mut loss = f64::INFINITY;
    for _ in 0..iters {
        let (l, g) = mean_logloss_and_grad(data, &beta);
        loss = l;
        if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-10 {
            break;
        }
        for (b, gj) in beta.iter_mut().zip(&g) {
            *b -= step * gj;
        }
    }
    (beta, loss)
}

pub struct GridOpt {
    pub j: f64,
    pub beta: f64,
    pub lambda: f64,
}

const GRID_STEP: f64 = 1e-3;
const GRID_BETA_MAX: f64 = 10.0;
const GRID_LAMBDA_MAX: f64 = 10.0;

/// Dense scan of the one-feature training objective
///   lambda * epsilon + mean_i max(softplus(-t_i), softplus(t_i) - lambda*kappa)
/// over beta in [-10, 10] and feasible lambda >= |beta| (every norm and its
/// dual coincide with |.| in one dimension), both on a 1e-3 lattice. With
/// kappa infinite the flip branch drops and the cheapest feasible lambda
/// is exact.
pub fn grid_oracle_1d(data: &Dataset, epsilon: f64, kappa: Kappa) -> GridOpt {
    assert_eq!(data.dim(), 1);
    let m0: Vec<f64> = data.iter().map(|s| s.y().signum() * s.x()[0]).collect();
    let n = m0.len() as f64;
    let beta_steps = (2.0 * GRID_BETA_MAX / GRID_STEP).round() as usize;
    let mut best = GridOpt {
        j: f64::INFINITY,
        beta: 0.0,
        lambda: 0.0,
    };
    for bi in 0..=beta_steps {
        let beta = -GRID_BETA_MAX + bi as f64 * GRID_STEP;
        let ts: Vec<f64> = m0.iter().map(|m| beta * m).collect();
        let keep_mean: f64 = ts.iter().map(|t| own_softplus(-t)).sum::<f64>() / n;
        match kappa {
            Kappa::Infinite => {
                let lambda = beta.abs();
                let j = epsilon * lambda + keep_mean;
                if j < best.j {
                    best = GridOpt { j, beta, lambda };
                }
            }
            Kappa::Finite(k) => {
                let lo = beta.abs();
                let lam_steps = ((GRID_LAMBDA_MAX - lo) / GRID_STEP).floor() as usize;
                for li in 0..=lam_steps {
                    let lambda = lo + li as f64 * GRID_STEP;
                    let extra: f64 = ts.iter().map(|t| (t - lambda * k).max(0.0)).sum::<f64>() / n;
                    let j = epsilon * lambda + keep_mean + extra;
                    if j < best.j {
                        best = GridOpt { j, beta, lambda };
                    }
                }
            }
        }
    }
    best
}

fn worst_dual_term(m: f64, b: f64, kappa: Kappa, lambda: f64) -> f64 {
    if m <= 0.0 {
        return 1.0;
    }
    let mut t = (1.0 - lambda * m / b).max(0.0);
    if let Kappa::Finite(k) = kappa {
        t = t.max(1.0 - lambda * k);
    }
    t
}

fn best_dual_term(m: f64, b: f64, kappa: Kappa, lambda: f64) -> f64 {
    if m >= 0.0 {
        return 0.0;
    }
    let mut t = (lambda * (-m) / b).min(1.0);
    if let Kappa::Finite(k) = kappa {
        t = t.min(lambda * k);
    }
    t
}

/// Value of the worst-case dual objective at one multiplier.
pub fn worst_value_at(margins: &[f64], b: f64, epsilon: f64, kappa: Kappa, lambda: f64) -> f64 {
    let n = margins.len() as f64;
    let mean: f64 = margins
        .iter()
        .map(|&m| worst_dual_term(m, b, kappa, lambda))
        .sum::<f64>()
        / n;
    lambda * epsilon + mean
}

/// Value of the best-case dual objective at one multiplier.
pub fn best_value_at(margins: &[f64], b: f64, epsilon: f64, kappa: Kappa, lambda: f64) -> f64 {
    let n = margins.len() as f64;
    let mean: f64 = margins
        .iter()
        .map(|&m| best_dual_term(m, b, kappa, lambda))
        .sum::<f64>()
        / n;
    mean - lambda * epsilon
}

fn risk_lambda_hi(margins: &[f64], b: f64, kappa: Kappa) -> f64 {
    let mut hi = 0.0f64;
    for &m in margins {
        if m.abs() > 0.0 {
            hi = hi.max(b / m.abs());
        }
    }
    if let Kappa::Finite(k) = kappa {
        hi = hi.max(1.0 / k);
    }
    2.0 * hi + 1.0
}

const RISK_GRID_STEP: f64 = 1e-5;

/// Dense lambda-scan of the worst-case-risk dual
///   min over lambda >= 0 of lambda*eps + mean_i [error already, or the
///   cheaper of move-to-boundary and flip]
/// at 1e-5 resolution past the last kink. Callers should keep margins
/// bounded away from 0 relative to b so the window stays small.
pub fn risk_grid_worst(margins: &[f64], b: f64, epsilon: f64, kappa: Kappa) -> f64 {
    assert!(b > 0.0);
    let hi = risk_lambda_hi(margins, b, kappa);
    let steps = (hi / RISK_GRID_STEP).ceil() as usize;
    let mut best = f64::INFINITY;
    for li in 0..=steps {
        let lambda = li as f64 * RISK_GRID_STEP;
        best = best.min(worst_value_at(margins, b, epsilon, kappa, lambda));
    }
    best
}

/// Dense lambda-scan of the best-case-risk dual: max over lambda >= 0 of
/// -lambda*eps + mean_i min(1, cost to rescue sample i scaled by lambda).
pub fn risk_grid_best(margins: &[f64], b: f64, epsilon: f64, kappa: Kappa) -> f64 {
    assert!(b > 0.0);
    let hi = risk_lambda_hi(margins, b, kappa);
    let steps = (hi / RISK_GRID_STEP).ceil() as usize;
    let mut best = f64::NEG_INFINITY;
    for li in 0..=steps {
        let lambda = li as f64 * RISK_GRID_STEP;
        best = best.max(best_value_at(margins, b, epsilon, kappa, lambda));
    }
    best.max(0.0)
}
