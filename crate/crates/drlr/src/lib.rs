//! Distributionally robust logistic regression over Wasserstein balls.
//!
//! Fits linear classifiers by minimizing the worst-case expected logloss
//! over all distributions within a transport-cost radius of the empirical
//! one, via an equivalent finite convex program. Alongside training, the
//! crate certifies worst- and best-case misclassification rates for a fixed
//! classifier, calibrates the radius by bootstrap coverage or an a-priori
//! formula, generates seeded synthetic data, loads CSV datasets, and scores
//! models with tail-aware metrics.
//!
//! Entry points:
//! - [`train_drlr`], [`train_classical`], [`train_regularized`]: fitting.
//! - [`risk_bounds`]: certified misclassification-rate interval.
//! - [`calibrate_by_coverage`], [`radius_formula`]: radius selection.
//! - [`generate`], [`load_csv`], [`split`]: data handling.
//! - [`evaluate`]: logloss, correct-classification rate, tail CVaR.

pub mod calibrate;
pub mod data;
pub mod error;
pub mod la;
pub mod loss;
pub mod metrics;
pub mod norms;
pub mod project;
pub mod risk;
pub mod rng;
pub mod solver;
pub mod types;

pub use calibrate::{
    calibrate_by_coverage, radius_formula, CalibrationConfig, CalibrationReport, CoverageRow,
    RadiusFormulaParams, DEFAULT_TEST_SIZE,
};
pub use data::{
    generate, load_csv, split, BetaTrue, ColumnRef, CsvSchema, SplitSize, SplitSpec, Standardizer,
    SyntheticSpec,
};
pub use error::{Error, Result};
pub use metrics::{cvar_from_losses, evaluate, loss_cdf, CvarPoint, EvalSummary, DEFAULT_ALPHAS};
pub use norms::NormKind;
pub use risk::{best_case_risk, empirical_risk, risk_bounds, worst_case_risk, RiskBounds};
pub use solver::{
    train_classical, train_drlr, train_drlr_grid, train_regularized, worst_case_loss_decomposition,
    LossDecomposition, SolveMethod, StepRule, TrainConfig, TrainedModel,
};
pub use types::{Dataset, Kappa, Label, LabeledSample, MetricParams};
