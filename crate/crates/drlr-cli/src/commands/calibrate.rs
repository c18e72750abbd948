use super::Ctx;
use crate::artifacts::{fmt_f64, write_csv, write_json, Manifest};
use crate::cli::CalibrateArgs;
use crate::config::{parse_beta, parse_grid, parse_kappa, parse_norm};
use crate::error::CliResult;
use drlr::calibrate::{calibrate_by_coverage, CalibrationConfig};
use drlr::data::{BetaTrue, SyntheticSpec};
use drlr::norms::NormKind;
use drlr::solver::TrainConfig;
use drlr::types::{Kappa, MetricParams};
use serde_json::json;

pub fn run(ctx: &Ctx, args: &CalibrateArgs) -> CliResult<()> {
    let n = ctx.cfg.resolve(args.n, "n", 10usize)?;
    let beta = ctx
        .cfg
        .resolve_with(args.beta.as_deref(), "beta", BetaTrue::FirstAxis10, |s| {
            parse_beta(s)
        })?;
    let train_size = ctx.cfg.resolve(args.train_size, "train_size", 100usize)?;
    let test_size = ctx.cfg.resolve(args.test_size, "test_size", 10_000usize)?;
    let eta = ctx.cfg.resolve(args.eta, "eta", 0.05f64)?;
    let grid = ctx.cfg.resolve_with(
        args.grid.as_deref(),
        "grid",
        parse_grid("log:1e-3:1:16")?,
        parse_grid,
    )?;
    let runs = ctx.cfg.resolve(args.runs, "runs", 20usize)?;
    let norm = ctx
        .cfg
        .resolve_with(args.norm.as_deref(), "norm", NormKind::Linf, parse_norm)?;
    let kappa = ctx
        .cfg
        .resolve_with(args.kappa.as_deref(), "kappa", Kappa::Finite(1.0), |s| {
            parse_kappa(s)
        })?;

    let spec = SyntheticSpec::new(n, beta, ctx.seed)?;
    let metric = MetricParams::new(norm, kappa)?;
    let config = CalibrationConfig {
        train_size,
        test_size,
        eta_target: eta,
        epsilon_grid: grid.clone(),
        runs,
        seed: ctx.seed,
        solver: TrainConfig::new(0.0, metric)?,
    };
    let report = calibrate_by_coverage(&spec, &config)?;

    let rows: Vec<Vec<String>> = report
        .grid
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.epsilon),
                fmt_f64(r.coverage),
                fmt_f64(r.mean_ccr),
                fmt_f64(r.mean_logloss),
            ]
        })
        .collect();
    write_csv(
        &ctx.path("coverage.csv"),
        "epsilon,coverage,mean_ccr,mean_logloss",
        &rows,
    )?;
    write_json(&ctx.path("calibration.json"), &report)?;

    let manifest = Manifest {
        run: ctx.run_info("calibrate"),
        config: json!({
            "n": n,
            "beta_true": spec.beta_true,
            "train_size": train_size,
            "test_size": test_size,
            "eta": eta,
            "grid": grid,
            "runs": runs,
            "norm": norm,
            "kappa": kappa.as_f64(),
        }),
        outputs: vec!["coverage.csv".to_string(), "calibration.json".to_string()],
        summary: json!({
            "chosen_epsilon": report.chosen_epsilon,
            "noise_bound": report.noise_bound,
            "diagnostic": report.diagnostic,
        }),
    };
    write_json(&ctx.path("manifest.json"), &manifest)?;

    match report.chosen_epsilon {
        Some(e) => println!(
            "smallest radius reaching {:.0}% coverage: {e:.6}",
            100.0 * (1.0 - eta)
        ),
        None => println!(
            "no radius on the grid reached {:.0}% coverage; see coverage.csv",
            100.0 * (1.0 - eta)
        ),
    }
    Ok(())
}
