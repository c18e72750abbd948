//! Wasserstein radius selection: an a-priori two-regime formula with
//! user-supplied constants, and a seeded Monte-Carlo coverage calibration
//! that picks the smallest radius whose certificate holds often enough.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{generate, BetaTrue, SyntheticSpec};
use crate::error::{Error, Result};
use crate::metrics::evaluate;
use crate::rng::mix_seed;
use crate::solver::{train_drlr_grid, TrainConfig};

/// Constants of the a-priori radius rule. The rule needs light-tail
/// constants that are rarely known in practice, so they are explicit
/// inputs; the coverage calibration below is the recommended default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusFormulaParams {
    /// Tail exponent, > 1.
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Feature dimension.
    pub n: usize,
    /// Confidence level in (0, 1].
    pub eta: f64,
}

impl RadiusFormulaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 1.0) {
            return Err(Error::invalid("a", "tail exponent must exceed 1"));
        }
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("c3", self.c3)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.n == 0 {
            return Err(Error::invalid("n", "dimension must be at least 1"));
        }
        if !(self.eta.is_finite() && 0.0 < self.eta && self.eta <= 1.0) {
            return Err(Error::invalid(
                "eta",
                format!("confidence level must lie in (0, 1], got {}", self.eta),
            ));
        }
        Ok(())
    }
}

/// Two-regime a-priori radius: (log(c1/eta)/(c2 N))^(1/a) while
/// N < log(c1/eta)/(c2 c3), and the same base to the power 1/n from the
/// threshold on (N equal to the threshold uses the large-N branch).
pub fn radius_formula(n_samples: usize, params: &RadiusFormulaParams) -> Result<f64> {
    params.validate()?;
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "need at least one sample"));
    }
    let log_term = (params.c1 / params.eta).ln();
    if log_term <= 0.0 {
        return Err(Error::invalid(
            "c1",
            format!("log(c1/eta) = {log_term} is not positive; the radius rule needs c1 > eta"),
        ));
    }
    let threshold = log_term / (params.c2 * params.c3);
    let base = log_term / (params.c2 * n_samples as f64);
    let exponent = if (n_samples as f64) < threshold {
        1.0 / params.a
    } else {
        1.0 / params.n as f64
    };
    Ok(base.powf(exponent))
}

/// Inputs of the coverage calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub train_size: usize,
    /// Held-out samples per trial.
    pub test_size: usize,
    /// Acceptable miss probability; coverage target is 1 - eta_target.
    pub eta_target: f64,
    /// Radii to score, sorted ascending.
    pub epsilon_grid: Vec<f64>,
    pub runs: usize,
    pub seed: u64,
    /// Solver settings; its epsilon is overridden per grid point.
    pub solver: TrainConfig,
}

pub const DEFAULT_TEST_SIZE: usize = 10_000;

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.train_size == 0 {
            return Err(Error::invalid("train_size", "must be at least 1"));
        }
        if self.test_size == 0 {
            return Err(Error::invalid("test_size", "must be at least 1"));
        }
        if !(self.eta_target.is_finite() && 0.0 < self.eta_target && self.eta_target < 1.0) {
            return Err(Error::invalid(
                "eta_target",
                format!("must lie strictly between 0 and 1, got {}", self.eta_target),
            ));
        }
        if self.epsilon_grid.is_empty() {
            return Err(Error::invalid("epsilon_grid", "must not be empty"));
        }
        if self.epsilon_grid.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::invalid(
                "epsilon_grid",
                "entries must be finite and nonnegative",
            ));
        }
        for pair in self.epsilon_grid.windows(2) {
            if pair[0] > pair[1] {
                return Err(Error::invalid("epsilon_grid", "must be sorted ascending"));
            }
        }
        if self.runs == 0 {
            return Err(Error::invalid("runs", "must be at least 1"));
        }
        self.solver.validate()
    }
}

/// Aggregate result for one grid radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub epsilon: f64,
    /// Fraction of trials where mean test logloss <= the certificate.
    pub coverage: f64,
    pub mean_ccr: f64,
    pub mean_logloss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub grid: Vec<CoverageRow>,
    /// Smallest grid radius reaching the coverage target, if any.
    pub chosen_epsilon: Option<f64>,
    pub target_confidence: f64,
    /// Worst-case three-sigma Monte-Carlo noise on any coverage entry:
    /// 3*sqrt(0.25/runs). Observed non-monotonicity within this band is
    /// sampling noise, not a defect.
    pub noise_bound: f64,
    pub runs: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub seed: u64,
    pub diagnostic: Option<String>,
}

impl CalibrationReport {
    /// CSV rendering of the grid with full-precision decimal values.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("epsilon,coverage,mean_ccr,mean_logloss\n");
        for row in &self.grid {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                row.epsilon, row.coverage, row.mean_ccr, row.mean_logloss
            ));
        }
        out
    }
}

struct TrialResult {
    covered: Vec<bool>,
    ccr: Vec<f64>,
    logloss: Vec<f64>,
}

fn run_trial(
    generator: &SyntheticSpec,
    config: &CalibrationConfig,
    trial: u64,
) -> Result<TrialResult> {
    let trial_seed = mix_seed(config.seed, trial);
    // Resolve the true weights once so train and test share them, then give
    // train and test their own child seeds.
    let beta_spec = SyntheticSpec::new(
        generator.n,
        generator.beta_true.clone(),
        mix_seed(trial_seed, 0),
    )?;
    let beta_true = beta_spec.resolve_beta();
    let train_spec = SyntheticSpec::new(
        generator.n,
        BetaTrue::Explicit(beta_true.clone()),
        mix_seed(trial_seed, 1),
    )?;
    let test_spec = SyntheticSpec::new(
        generator.n,
        BetaTrue::Explicit(beta_true),
        mix_seed(trial_seed, 2),
    )?;
    let train = generate(&train_spec, config.train_size)?;
    let test = generate(&test_spec, config.test_size)?;

    let models = train_drlr_grid(&train, &config.solver, &config.epsilon_grid)?;
    let mut covered = Vec::with_capacity(models.len());
    let mut ccr = Vec::with_capacity(models.len());
    let mut logloss = Vec::with_capacity(models.len());
    for model in &models {
        let summary = evaluate(&model.beta, &test, &[1.0], false)?;
        // Averaging identical losses over different sample counts can move
        // the mean by an ulp; break exact mathematical ties toward covered.
        // The slack is eight orders below the Monte-Carlo noise of the
        // test mean, so it cannot flip a genuine miss.
        let tie = 1e-10 * model.j_hat.abs().max(1.0);
        covered.push(summary.mean_logloss <= model.j_hat + tie);
        ccr.push(summary.ccr);
        logloss.push(summary.mean_logloss);
    }
    Ok(TrialResult {
        covered,
        ccr,
        logloss,
    })
}

/// Scores every radius on `runs` independent trials: each trial draws a
/// fresh train set and its own held-out test set, fits the whole grid with
/// warm starts, and checks whether the certificate j_hat covered the mean
/// test logloss. Deterministic per seed; trials run in parallel and each
/// owns a private seed chain derived from (seed, trial_index).
pub fn calibrate_by_coverage(
    generator: &SyntheticSpec,
    config: &CalibrationConfig,
) -> Result<CalibrationReport> {
    config.validate()?;
    let trials: Vec<TrialResult> = (0..config.runs as u64)
        .into_par_iter()
        .map(|t| run_trial(generator, config, t))
        .collect::<Result<Vec<_>>>()?;

    let runs = config.runs as f64;
    let grid = config
        .epsilon_grid
        .iter()
        .enumerate()
        .map(|(i, &epsilon)| {
            let hits = trials.iter().filter(|t| t.covered[i]).count() as f64;
            CoverageRow {
                epsilon,
                coverage: hits / runs,
                mean_ccr: trials.iter().map(|t| t.ccr[i]).sum::<f64>() / runs,
                mean_logloss: trials.iter().map(|t| t.logloss[i]).sum::<f64>() / runs,
            }
        })
        .collect::<Vec<_>>();

    let target = 1.0 - config.eta_target;
    let chosen = grid.iter().find(|row| row.coverage >= target);
    let (chosen_epsilon, diagnostic) = match chosen {
        Some(row) => (Some(row.epsilon), None),
        None => (
            None,
            Some(format!(
                "no grid radius reached coverage {target}; best was {:.4} at epsilon {:.6}; extend the grid upward",
                grid.iter().map(|r| r.coverage).fold(0.0, f64::max),
                grid.iter()
                    .max_by(|a, b| a.coverage.partial_cmp(&b.coverage).unwrap())
                    .map(|r| r.epsilon)
                    .unwrap_or(f64::NAN),
            )),
        ),
    };

    Ok(CalibrationReport {
        grid,
        chosen_epsilon,
        target_confidence: target,
        noise_bound: 3.0 * (0.25 / runs).sqrt(),
        runs: config.runs,
        train_size: config.train_size,
        test_size: config.test_size,
        seed: config.seed,
        diagnostic,
    })
}
