//! Training of distributionally robust logistic regression.
//!
//! The program solved is
//!
//! ```text
//! minimize   lambda*eps + (1/N) sum_i max( l(beta,xi,yi), l(beta,xi,-yi) - lambda*kappa )
//! subject to dual_norm(beta) <= lambda
//! ```
//!
//! With t_i = yi*<beta,xi> the per-sample max equals
//! logloss_i + max(0, t_i - lambda*kappa), which is the form all solver
//! paths work on. Special cases dispatch to cheaper programs: eps = 0 drops
//! the constraint and the lambda terms (plain empirical logloss), infinite
//! kappa eliminates lambda = dual_norm(beta) and leaves the composite
//! objective eps*dual_norm(beta) + mean logloss.
//!
//! The default path smooths the hinge with a temperature-scaled softplus
//! and runs projected FISTA with backtracking under a decreasing
//! temperature schedule; a projected subgradient path (Polyak steps with a
//! vanishing target gap) solves the nonsmooth program directly. Both end
//! with an exact one-dimensional minimization over lambda, so the reported
//! objective is the true value at a feasible point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::la::{axpy, dist2, dot, norm2};
use crate::loss::{logistic, softplus};
use crate::norms::dual_norm;
use crate::project::{project_epigraph, prox_dual_norm};
use crate::types::{Dataset, Kappa, MetricParams};

/// Step selection for the smoothed/composite first-order path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Constant step from a conservative Lipschitz bound.
    Fixed,
    #[default]
    Backtracking,
}

/// Which solver runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Temperature-continuation smoothing plus projected FISTA.
    #[default]
    Smoothed,
    /// Projected subgradient with diminishing Polyak steps.
    Subgradient,
}

/// Solver configuration. The solver is deterministic: no field involves
/// randomness and repeated runs return bitwise-identical models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epsilon: f64,
    pub metric: MetricParams,
    pub max_iters: usize,
    /// Relative objective-change stop over a 50-iteration window.
    pub obj_tol: f64,
    pub feas_tol: f64,
    pub step_rule: StepRule,
    pub method: SolveMethod,
}

impl TrainConfig {
    pub fn new(epsilon: f64, metric: MetricParams) -> Result<TrainConfig> {
        let config = TrainConfig {
            epsilon,
            metric,
            max_iters: 50_000,
            obj_tol: 1e-8,
            feas_tol: 1e-9,
            step_rule: StepRule::default(),
            method: SolveMethod::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::invalid(
                "epsilon",
                format!(
                    "radius must be finite and nonnegative, got {}",
                    self.epsilon
                ),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be at least 1"));
        }
        if !(self.obj_tol.is_finite() && self.obj_tol > 0.0) {
            return Err(Error::invalid("obj_tol", "must be a positive real"));
        }
        if !(self.feas_tol.is_finite() && self.feas_tol > 0.0) {
            return Err(Error::invalid("feas_tol", "must be a positive real"));
        }
        Ok(())
    }
}

/// A fitted model: weights, multiplier, per-sample slacks, and the achieved
/// objective value (a valid upper bound on the robust loss, since the
/// returned point is always feasible).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub beta: Vec<f64>,
    pub lambda: f64,
    pub slacks: Vec<f64>,
    pub j_hat: f64,
    pub iterations: usize,
    /// False when max_iters ran out before the windowed stop fired.
    pub converged: bool,
    /// True when the weight-norm cap (1e6) engaged, which happens on
    /// separable data at eps = 0 where no finite minimizer exists.
    pub norm_capped: bool,
    pub config_echo: TrainConfig,
}

/// The objective split into its three additive parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossDecomposition {
    /// lambda * eps
    pub reg_term: f64,
    /// mean training logloss at beta
    pub empirical_logloss: f64,
    /// mean max(0, y<beta,x> - lambda*kappa); the price of label ambiguity
    pub label_uncertainty_term: f64,
}

impl LossDecomposition {
    pub fn total(&self) -> f64 {
        self.reg_term + self.empirical_logloss + self.label_uncertainty_term
    }
}

const BETA_NORM_CAP: f64 = 1e6;
const STOP_WINDOW: usize = 50;
const TAU_SCHEDULE: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

struct Problem<'a> {
    data: &'a Dataset,
    epsilon: f64,
    kappa: Kappa,
    norm: crate::norms::NormKind,
}

impl<'a> Problem<'a> {
    fn new(data: &'a Dataset, config: &TrainConfig) -> Problem<'a> {
        Problem {
            data,
            epsilon: config.epsilon,
            kappa: config.metric.kappa,
            norm: config.metric.norm,
        }
    }

    fn count(&self) -> f64 {
        self.data.len() as f64
    }

    fn margins(&self, beta: &[f64]) -> Vec<f64> {
        self.data
            .iter()
            .map(|s| s.y().signum() * dot(beta, s.x()))
            .collect()
    }

    /// F(beta, lambda), the exact nonsmooth objective.
    fn objective(&self, beta: &[f64], lambda: f64) -> f64 {
        let mut sum = 0.0;
        for s in self.data.iter() {
            let t = s.y().signum() * dot(beta, s.x());
            sum += softplus(-t);
            if let Kappa::Finite(k) = self.kappa {
                sum += (t - lambda * k).max(0.0);
            }
        }
        lambda * self.epsilon + sum / self.count()
    }

    /// Smoothed objective value; hinge replaced by tau*softplus(arg/tau).
    fn smoothed_value(&self, beta: &[f64], lambda: f64, tau: f64) -> f64 {
        let mut sum = 0.0;
        for s in self.data.iter() {
            let t = s.y().signum() * dot(beta, s.x());
            sum += softplus(-t);
            if let Kappa::Finite(k) = self.kappa {
                sum += tau * softplus((t - lambda * k) / tau);
            }
        }
        lambda * self.epsilon + sum / self.count()
    }

    /// Smoothed objective with its gradient in (beta, lambda).
    fn smoothed_grad(&self, beta: &[f64], lambda: f64, tau: f64) -> (f64, Vec<f64>, f64) {
        let n = self.count();
        let mut sum = 0.0;
        let mut grad_beta = vec![0.0; beta.len()];
        let mut grad_lambda = self.epsilon;
        for s in self.data.iter() {
            let y = s.y().signum();
            let t = y * dot(beta, s.x());
            sum += softplus(-t);
            let mut coef = -logistic(-t);
            if let Kappa::Finite(k) = self.kappa {
                let u = (t - lambda * k) / tau;
                sum += tau * softplus(u);
                let w = logistic(u);
                coef += w;
                grad_lambda -= k * w / n;
            }
            axpy(coef * y / n, s.x(), &mut grad_beta);
        }
        (lambda * self.epsilon + sum / n, grad_beta, grad_lambda)
    }

    /// Mean logloss and its gradient (the smooth part of the composite
    /// special cases).
    fn logloss_grad(&self, beta: &[f64]) -> (f64, Vec<f64>) {
        let n = self.count();
        let mut sum = 0.0;
        let mut grad = vec![0.0; beta.len()];
        for s in self.data.iter() {
            let y = s.y().signum();
            let t = y * dot(beta, s.x());
            sum += softplus(-t);
            axpy(-logistic(-t) * y / n, s.x(), &mut grad);
        }
        (sum / n, grad)
    }

    fn mean_logloss(&self, beta: &[f64]) -> f64 {
        let sum: f64 = self
            .data
            .iter()
            .map(|s| softplus(-s.y().signum() * dot(beta, s.x())))
            .sum();
        sum / self.count()
    }

    /// A subgradient of F at (beta, lambda); ties in the per-sample max
    /// take the midpoint of the two branch gradients.
    fn subgradient(&self, beta: &[f64], lambda: f64) -> (Vec<f64>, f64) {
        let n = self.count();
        let mut grad_beta = vec![0.0; beta.len()];
        let mut grad_lambda = self.epsilon;
        for s in self.data.iter() {
            let y = s.y().signum();
            let t = y * dot(beta, s.x());
            let mut coef = -logistic(-t);
            if let Kappa::Finite(k) = self.kappa {
                let d = t - lambda * k;
                let ind = if d > 0.0 {
                    1.0
                } else if d == 0.0 {
                    0.5
                } else {
                    0.0
                };
                coef += ind;
                grad_lambda -= k * ind / n;
            }
            axpy(coef * y / n, s.x(), &mut grad_beta);
        }
        (grad_beta, grad_lambda)
    }

    /// Exact minimizer of lambda -> lambda*eps + mean max(0, t - lambda*k)
    /// over lambda >= dual_norm(beta): a convex piecewise-linear profile,
    /// minimized at the domain edge or a breakpoint t_i/k. Returns the
    /// smallest minimizer.
    fn polish_lambda(&self, beta: &[f64], margins: &[f64]) -> f64 {
        let lo = dual_norm(beta, self.norm);
        let Kappa::Finite(k) = self.kappa else {
            return lo;
        };
        let profile = |lambda: f64| -> f64 {
            let sum: f64 = margins.iter().map(|t| (t - lambda * k).max(0.0)).sum();
            lambda * self.epsilon + sum / self.count()
        };
        let mut cands: Vec<f64> = margins
            .iter()
            .map(|t| t / k)
            .filter(|&c| c.is_finite() && c > lo)
            .collect();
        cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut best_l = lo;
        let mut best_g = profile(lo);
        for c in cands {
            let g = profile(c);
            if g < best_g {
                best_g = g;
                best_l = c;
            }
        }
        best_l
    }

    fn slacks(&self, margins: &[f64], lambda: f64) -> Vec<f64> {
        margins
            .iter()
            .map(|&t| {
                let mut s = softplus(-t);
                if let Kappa::Finite(k) = self.kappa {
                    s += (t - lambda * k).max(0.0);
                }
                s
            })
            .collect()
    }

    /// Upper bound on the gradient Lipschitz constant of the smoothed
    /// objective at temperature tau (or of the plain logloss for `None`).
    fn lipschitz_bound(&self, tau: Option<f64>) -> f64 {
        let n = self.count();
        let mean_sq: f64 = self.data.iter().map(|s| dot(s.x(), s.x())).sum::<f64>() / n;
        let mut l = mean_sq / 4.0;
        if let (Some(tau), Kappa::Finite(k)) = (tau, self.kappa) {
            l += (mean_sq + k * k) / (4.0 * tau);
        }
        l.max(1e-12)
    }
}

fn cap_beta(beta: &mut [f64]) -> bool {
    let nrm = norm2(beta);
    if nrm > BETA_NORM_CAP {
        let scale = BETA_NORM_CAP / nrm;
        for v in beta.iter_mut() {
            *v *= scale;
        }
        true
    } else {
        false
    }
}

struct SolveState {
    beta: Vec<f64>,
    iterations: usize,
    converged: bool,
    norm_capped: bool,
}

struct StageOutcome {
    z: Vec<f64>,
    iterations: usize,
    converged: bool,
    norm_capped: bool,
}

/// Smooth part of a composite objective: value and gradient at a point.
type ValueGrad<'a> = dyn Fn(&[f64]) -> (f64, Vec<f64>) + 'a;

/// One FISTA run: accelerated proximal gradient with optional backtracking,
/// function-value restart, a windowed relative-change stop, and the
/// weight-norm cap. `beta_len` marks the prefix of z that holds weights.
#[allow(clippy::too_many_arguments)]
fn fista_stage(
    z0: Vec<f64>,
    beta_len: usize,
    l_init: f64,
    fixed_l: Option<f64>,
    max_iters: usize,
    obj_tol: f64,
    f_grad: &ValueGrad<'_>,
    f_val: &dyn Fn(&[f64]) -> f64,
    prox: &dyn Fn(&[f64], f64) -> Vec<f64>,
    full_obj: &dyn Fn(&[f64]) -> f64,
) -> StageOutcome {
    let mut x = z0.clone();
    let mut y = z0;
    let mut t = 1.0f64;
    let mut l = fixed_l.unwrap_or(l_init).max(1e-12);
    let l_floor = l * 1e-9;
    let mut obj_x = full_obj(&x);
    let mut hist = Vec::with_capacity(max_iters.min(8192));
    hist.push(obj_x);
    let mut converged = false;
    let mut capped = false;
    let mut iters = 0;

    for _ in 0..max_iters {
        iters += 1;
        let (f_y, grad) = f_grad(&y);
        let mut candidate;
        loop {
            let step = 1.0 / l;
            let mut shifted = y.clone();
            axpy(-step, &grad, &mut shifted);
            candidate = prox(&shifted, step);
            if fixed_l.is_some() {
                break;
            }
            let f_c = f_val(&candidate);
            let gap: f64 = dot(&grad, &candidate) - dot(&grad, &y);
            let quad = f_y + gap + 0.5 * l * dist2(&candidate, &y).powi(2);
            if f_c <= quad + 1e-12 * quad.abs().max(1.0) || l > 1e18 {
                l = (l * 0.97).max(l_floor);
                break;
            }
            l *= 2.0;
        }
        if cap_beta(&mut candidate[..beta_len]) {
            capped = true;
            t = 1.0;
        }
        let obj_new = full_obj(&candidate);
        let x_prev = std::mem::replace(&mut x, candidate);
        if obj_new > obj_x {
            // adaptive restart: drop momentum when the objective backslides
            t = 1.0;
            y = x.clone();
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let w = (t - 1.0) / t_next;
            y = x.clone();
            for (yi, (xi, pi)) in y.iter_mut().zip(x.iter().zip(&x_prev)) {
                *yi = xi + w * (xi - pi);
            }
            t = t_next;
        }
        obj_x = obj_new;
        hist.push(obj_x);
        if hist.len() > STOP_WINDOW {
            let past = hist[hist.len() - 1 - STOP_WINDOW];
            if (past - obj_x).abs() <= obj_tol * obj_x.abs().max(1.0) {
                converged = true;
                break;
            }
        }
    }

    StageOutcome {
        z: x,
        iterations: iters,
        converged,
        norm_capped: capped,
    }
}

/// eps = 0 or infinite kappa: FISTA on mean logloss plus the prox-friendly
/// penalty eps*dual_norm(beta) (identity prox at eps = 0).
fn solve_composite(prob: &Problem, config: &TrainConfig, beta0: Vec<f64>) -> SolveState {
    let lip = prob.lipschitz_bound(None);
    let penalty = if prob.kappa.is_infinite() {
        prob.epsilon
    } else {
        // eps = 0 with finite kappa: the lambda terms vanish at the optimum
        0.0
    };
    let f_grad = |z: &[f64]| prob.logloss_grad(z);
    let f_val = |z: &[f64]| prob.mean_logloss(z);
    let prox = move |z: &[f64], step: f64| prox_dual_norm(z, penalty * step, prob.norm);
    let full_obj = move |z: &[f64]| prob.mean_logloss(z) + penalty * dual_norm(z, prob.norm);
    let fixed = match config.step_rule {
        StepRule::Fixed => Some(lip),
        StepRule::Backtracking => None,
    };
    let beta_len = beta0.len();
    let out = fista_stage(
        beta0,
        beta_len,
        lip / 16.0,
        fixed,
        config.max_iters,
        config.obj_tol,
        &f_grad,
        &f_val,
        &prox,
        &full_obj,
    );
    SolveState {
        beta: out.z,
        iterations: out.iterations,
        converged: out.converged,
        norm_capped: out.norm_capped,
    }
}

/// General case: FISTA on the smoothed objective over the dual-norm
/// epigraph, with the temperature lowered in stages.
fn solve_smoothed_cone(
    prob: &Problem,
    config: &TrainConfig,
    beta0: Vec<f64>,
    lambda0: f64,
) -> SolveState {
    let beta_len = beta0.len();
    let (pb, pl) = project_epigraph(&beta0, lambda0, prob.norm);
    let mut z: Vec<f64> = pb;
    z.push(pl);

    let stage_cap = (config.max_iters / 10).max(200);
    let mut used = 0;
    let mut converged = false;
    let mut capped = false;

    for (si, &tau) in TAU_SCHEDULE.iter().enumerate() {
        let last = si + 1 == TAU_SCHEDULE.len();
        let budget = if last {
            config.max_iters.saturating_sub(used).max(1)
        } else {
            stage_cap.min(config.max_iters.saturating_sub(used))
        };
        if budget == 0 {
            break;
        }
        let lip = prob.lipschitz_bound(Some(tau));
        let f_grad = move |z: &[f64]| {
            let (v, gb, gl) = prob.smoothed_grad(&z[..beta_len], z[beta_len], tau);
            let mut g = gb;
            g.push(gl);
            (v, g)
        };
        let f_val = move |z: &[f64]| prob.smoothed_value(&z[..beta_len], z[beta_len], tau);
        let prox = move |z: &[f64], _step: f64| {
            let (pb, pl) = project_epigraph(&z[..beta_len], z[beta_len], prob.norm);
            let mut out = pb;
            out.push(pl);
            out
        };
        let fixed = match config.step_rule {
            StepRule::Fixed => Some(lip),
            StepRule::Backtracking => None,
        };
        let out = fista_stage(
            z,
            beta_len,
            lip / 16.0,
            fixed,
            budget,
            config.obj_tol,
            &f_grad,
            &f_val,
            &prox,
            &f_val,
        );
        z = out.z;
        used += out.iterations;
        capped |= out.norm_capped;
        if last {
            converged = out.converged;
        }
    }

    let beta = z[..beta_len].to_vec();
    SolveState {
        beta,
        iterations: used,
        converged,
        norm_capped: capped,
    }
}

/// Projected subgradient with Polyak steps against the running best value
/// minus a vanishing slack; tracks and returns the best visited point.
fn solve_subgradient(
    prob: &Problem,
    config: &TrainConfig,
    beta0: Vec<f64>,
    lambda0: f64,
) -> SolveState {
    let (mut beta, mut lambda) = project_epigraph(&beta0, lambda0, prob.norm);
    let mut f_here = prob.objective(&beta, lambda);
    let mut best_beta = beta.clone();
    let mut best_f = f_here;
    let delta0 = 0.05 * (1.0 + f_here.abs());
    let mut hist = Vec::with_capacity(config.max_iters.min(8192));
    hist.push(best_f);
    let mut converged = false;
    let mut capped = false;
    let mut iters = 0;

    for k in 0..config.max_iters {
        iters += 1;
        let (gb, gl) = prob.subgradient(&beta, lambda);
        let gg = dot(&gb, &gb) + gl * gl;
        if gg < 1e-30 {
            converged = true;
            break;
        }
        let delta = delta0 / (k as f64 + 1.0);
        let alpha = ((f_here - best_f + delta) / gg).max(0.0);
        let mut nb = beta.clone();
        axpy(-alpha, &gb, &mut nb);
        let (pb, pl) = project_epigraph(&nb, lambda - alpha * gl, prob.norm);
        beta = pb;
        lambda = pl;
        if cap_beta(&mut beta) {
            capped = true;
            lambda = lambda.max(dual_norm(&beta, prob.norm));
        }
        f_here = prob.objective(&beta, lambda);
        if f_here < best_f {
            best_f = f_here;
            best_beta = beta.clone();
        }
        hist.push(best_f);
        if hist.len() > STOP_WINDOW {
            let past = hist[hist.len() - 1 - STOP_WINDOW];
            if (past - best_f).abs() <= config.obj_tol * best_f.abs().max(1.0) {
                converged = true;
                break;
            }
        }
    }

    SolveState {
        beta: best_beta,
        iterations: iters,
        converged,
        norm_capped: capped,
    }
}

fn train_from(
    data: &Dataset,
    config: &TrainConfig,
    beta0: Vec<f64>,
    lambda0: f64,
) -> Result<TrainedModel> {
    config.validate()?;
    if beta0.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: beta0.len(),
        });
    }
    let prob = Problem::new(data, config);
    let composite = config.epsilon == 0.0 || config.metric.kappa.is_infinite();
    let state = match config.method {
        SolveMethod::Subgradient => solve_subgradient(&prob, config, beta0, lambda0),
        SolveMethod::Smoothed if composite => solve_composite(&prob, config, beta0),
        SolveMethod::Smoothed => solve_smoothed_cone(&prob, config, beta0, lambda0),
    };
    let margins = prob.margins(&state.beta);
    let lambda = prob.polish_lambda(&state.beta, &margins);
    let slacks = prob.slacks(&margins, lambda);
    let j_hat = lambda * config.epsilon + slacks.iter().sum::<f64>() / prob.count();
    Ok(TrainedModel {
        beta: state.beta,
        lambda,
        slacks,
        j_hat,
        iterations: state.iterations,
        converged: state.converged,
        norm_capped: state.norm_capped,
        config_echo: config.clone(),
    })
}

/// Fits the robust program from the zero start.
pub fn train_drlr(data: &Dataset, config: &TrainConfig) -> Result<TrainedModel> {
    train_from(data, config, vec![0.0; data.dim()], 0.0)
}

/// Plain empirical logistic regression (radius zero).
pub fn train_classical(data: &Dataset) -> Result<TrainedModel> {
    let metric = MetricParams::new(crate::norms::NormKind::L2, Kappa::Infinite)?;
    train_drlr(data, &TrainConfig::new(0.0, metric)?)
}

/// Dual-norm regularized logistic regression (infinite kappa): minimizes
/// eps*dual_norm(beta) + mean logloss.
pub fn train_regularized(
    data: &Dataset,
    epsilon: f64,
    norm: crate::norms::NormKind,
) -> Result<TrainedModel> {
    let metric = MetricParams::new(norm, Kappa::Infinite)?;
    train_drlr(data, &TrainConfig::new(epsilon, metric)?)
}

/// Fits one model per radius, in the given order, warm-starting each fit
/// from the previous solution. Callers wanting the continuation speedup
/// should pass radii in ascending order.
pub fn train_drlr_grid(
    data: &Dataset,
    base: &TrainConfig,
    epsilons: &[f64],
) -> Result<Vec<TrainedModel>> {
    let mut models = Vec::with_capacity(epsilons.len());
    let mut beta = vec![0.0; data.dim()];
    let mut lambda = 0.0;
    for &eps in epsilons {
        let mut config = base.clone();
        config.epsilon = eps;
        let model = train_from(data, &config, beta, lambda)?;
        beta = model.beta.clone();
        lambda = model.lambda;
        models.push(model);
    }
    Ok(models)
}

/// Splits the fitted objective into its three additive terms, recomputed
/// directly from (beta, lambda) on `data`.
pub fn worst_case_loss_decomposition(
    model: &TrainedModel,
    data: &Dataset,
) -> Result<LossDecomposition> {
    if model.beta.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.beta.len(),
            got: data.dim(),
        });
    }
    let n = data.len() as f64;
    let mut logloss_sum = 0.0;
    let mut hinge_sum = 0.0;
    for s in data.iter() {
        let t = s.y().signum() * dot(&model.beta, s.x());
        logloss_sum += softplus(-t);
        if let Kappa::Finite(k) = model.config_echo.metric.kappa {
            hinge_sum += (t - model.lambda * k).max(0.0);
        }
    }
    Ok(LossDecomposition {
        reg_term: model.lambda * model.config_echo.epsilon,
        empirical_logloss: logloss_sum / n,
        label_uncertainty_term: hinge_sum / n,
    })
}
