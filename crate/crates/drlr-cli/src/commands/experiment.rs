use super::{load_dataset, Ctx};
use crate::artifacts::{fmt_f64, write_csv, write_json, Manifest};
use crate::cli::ExperimentArgs;
use crate::config::{parse_grid, parse_usize_list};
use crate::error::{CliError, CliResult};
use drlr::calibrate::{calibrate_by_coverage, CalibrationConfig};
use drlr::data::{generate, split, BetaTrue, SplitSize, SplitSpec, Standardizer, SyntheticSpec};
use drlr::metrics::evaluate;
use drlr::norms::NormKind;
use drlr::rng::mix_seed;
use drlr::solver::{train_classical, train_drlr, train_drlr_grid, train_regularized, TrainConfig};
use drlr::types::{Kappa, MetricParams};
use drlr::{Dataset, LabeledSample};
use rayon::prelude::*;
use serde_json::json;

pub fn run(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<()> {
    match args.number {
        1 => coverage_vs_sample_count(ctx, args),
        2 => radius_sweep(ctx, args),
        3 => benchmark_splits(ctx, args),
        other => Err(CliError::usage(format!(
            "unknown experiment {other}; expected 1, 2, or 3"
        ))),
    }
}

/// Experiment 1: how much radius does a 95% certificate need at different
/// training sizes? Spiked truth, strongest-signal first axis.
fn coverage_vs_sample_count(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<()> {
    let sizes = ctx.cfg.resolve_with(
        args.sizes.as_deref(),
        "sizes",
        vec![10usize, 100usize],
        parse_usize_list,
    )?;
    let runs = ctx.cfg.resolve(args.runs, "runs", 20usize)?;
    let test_size = ctx.cfg.resolve(args.test_size, "test_size", 10_000usize)?;
    let grid = ctx.cfg.resolve_with(
        args.grid.as_deref(),
        "grid",
        parse_grid("log:1e-3:1:16")?,
        parse_grid,
    )?;

    let spec = SyntheticSpec::new(10, BetaTrue::FirstAxis10, ctx.seed)?;
    let metric = MetricParams::new(NormKind::Linf, Kappa::Finite(1.0))?;
    let mut outputs = Vec::new();
    let mut chosen = serde_json::Map::new();
    for &size in &sizes {
        let config = CalibrationConfig {
            train_size: size,
            test_size,
            eta_target: 0.05,
            epsilon_grid: grid.clone(),
            runs,
            seed: mix_seed(ctx.seed, size as u64),
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
        let name = format!("coverage_train{size}.csv");
        write_csv(
            &ctx.path(&name),
            "epsilon,coverage,mean_ccr,mean_logloss",
            &rows,
        )?;
        outputs.push(name);
        chosen.insert(format!("train_{size}"), json!(report.chosen_epsilon));
    }

    let manifest = Manifest {
        run: ctx.run_info("experiment-1"),
        config: json!({
            "sizes": sizes,
            "runs": runs,
            "test_size": test_size,
            "grid": grid,
            "n": 10,
            "beta_true": "spike",
            "norm": NormKind::Linf,
            "kappa": 1.0,
            "eta": 0.05,
        }),
        outputs: outputs.clone(),
        summary: json!({ "chosen_epsilon": chosen }),
    };
    write_json(&ctx.path("manifest.json"), &manifest)?;
    println!(
        "experiment 1 done: {} coverage tables in {}",
        outputs.len(),
        ctx.out_dir.display()
    );
    Ok(())
}

struct SweepRow {
    run: usize,
    epsilon: f64,
    beta_norm: f64,
    j_hat: f64,
    test_logloss: f64,
    test_ccr: f64,
    test_cvar: f64,
}

/// Experiment 2: radius sweep on fresh spherical truths; reports held-out
/// mean loss, accuracy, and the 5% tail CVaR per radius.
fn radius_sweep(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<()> {
    let runs = ctx.cfg.resolve(args.runs, "runs", 20usize)?;
    let train_size = ctx.cfg.resolve(args.train_size, "train_size", 100usize)?;
    let test_size = ctx.cfg.resolve(args.test_size, "test_size", 10_000usize)?;
    let radii = ctx.cfg.resolve_with(
        args.grid.as_deref(),
        "grid",
        vec![0.0, 0.05, 0.2],
        parse_grid,
    )?;
    if runs == 0 {
        return Err(CliError::usage("runs must be at least 1".to_string()));
    }

    let metric = MetricParams::new(NormKind::L2, Kappa::Finite(1.0))?;
    let base = TrainConfig::new(0.0, metric)?;
    let per_run: Vec<Vec<SweepRow>> = (0..runs)
        .into_par_iter()
        .map(|r| -> CliResult<Vec<SweepRow>> {
            let beta = SyntheticSpec::new(
                10,
                BetaTrue::UniformSphere,
                mix_seed(ctx.seed, 1000 + r as u64),
            )?
            .resolve_beta();
            let train = generate(
                &SyntheticSpec::new(
                    10,
                    BetaTrue::Explicit(beta.clone()),
                    mix_seed(ctx.seed, 2000 + r as u64),
                )?,
                train_size,
            )?;
            let test = generate(
                &SyntheticSpec::new(
                    10,
                    BetaTrue::Explicit(beta),
                    mix_seed(ctx.seed, 3000 + r as u64),
                )?,
                test_size,
            )?;
            let models = train_drlr_grid(&train, &base, &radii)?;
            let mut rows = Vec::with_capacity(models.len());
            for (model, &epsilon) in models.iter().zip(&radii) {
                let summary = evaluate(&model.beta, &test, &[0.05], false)?;
                rows.push(SweepRow {
                    run: r,
                    epsilon,
                    beta_norm: NormKind::L2.eval(&model.beta),
                    j_hat: model.j_hat,
                    test_logloss: summary.mean_logloss,
                    test_ccr: summary.ccr,
                    test_cvar: summary.cvar[0].value,
                });
            }
            Ok(rows)
        })
        .collect::<CliResult<Vec<_>>>()?;

    let rows: Vec<Vec<String>> = per_run
        .iter()
        .flatten()
        .map(|s| {
            vec![
                s.run.to_string(),
                fmt_f64(s.epsilon),
                fmt_f64(s.beta_norm),
                fmt_f64(s.j_hat),
                fmt_f64(s.test_logloss),
                fmt_f64(s.test_ccr),
                fmt_f64(s.test_cvar),
            ]
        })
        .collect();
    write_csv(
        &ctx.path("runs.csv"),
        "run,epsilon,beta_norm,j_hat,test_logloss,test_ccr,test_cvar05",
        &rows,
    )?;

    let nf = runs as f64;
    let mean_over = |f: &dyn Fn(&SweepRow) -> f64, k: usize| -> f64 {
        per_run.iter().map(|rows| f(&rows[k])).sum::<f64>() / nf
    };
    let summary_rows: Vec<Vec<String>> = radii
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            vec![
                fmt_f64(eps),
                fmt_f64(mean_over(&|s| s.beta_norm, k)),
                fmt_f64(mean_over(&|s| s.j_hat, k)),
                fmt_f64(mean_over(&|s| s.test_logloss, k)),
                fmt_f64(mean_over(&|s| s.test_ccr, k)),
                fmt_f64(mean_over(&|s| s.test_cvar, k)),
            ]
        })
        .collect();
    write_csv(
        &ctx.path("summary.csv"),
        "epsilon,mean_beta_norm,mean_j_hat,mean_test_logloss,mean_test_ccr,mean_test_cvar05",
        &summary_rows,
    )?;

    // tail comparison between the two smallest radii, when present
    let tail_wins = (radii.len() >= 2).then(|| {
        per_run
            .iter()
            .filter(|rows| rows[1].test_cvar < rows[0].test_cvar)
            .count()
    });
    let manifest = Manifest {
        run: ctx.run_info("experiment-2"),
        config: json!({
            "runs": runs,
            "train_size": train_size,
            "test_size": test_size,
            "radii": radii,
            "n": 10,
            "beta_true": "sphere",
            "norm": NormKind::L2,
            "kappa": 1.0,
        }),
        outputs: vec!["runs.csv".to_string(), "summary.csv".to_string()],
        summary: json!({
            "tail_wins_smallest_positive_radius": tail_wins,
            "mean_beta_norm_largest_radius": mean_over(&|s| s.beta_norm, radii.len() - 1),
            "mean_test_logloss_largest_radius": mean_over(&|s| s.test_logloss, radii.len() - 1),
        }),
    };
    write_json(&ctx.path("manifest.json"), &manifest)?;
    println!(
        "experiment 2 done: {runs} runs over {} radii in {}",
        radii.len(),
        ctx.out_dir.display()
    );
    Ok(())
}

fn drop_constant_columns(data: &Dataset) -> CliResult<Dataset> {
    let dim = data.dim();
    let keep: Vec<usize> = (0..dim)
        .filter(|&j| {
            let lo = data.iter().map(|s| s.x()[j]).fold(f64::INFINITY, f64::min);
            let hi = data
                .iter()
                .map(|s| s.x()[j])
                .fold(f64::NEG_INFINITY, f64::max);
            hi > lo
        })
        .collect();
    if keep.is_empty() {
        return Err(CliError::usage(
            "benchmark data has no varying feature columns".to_string(),
        ));
    }
    let samples = data
        .iter()
        .map(|s| {
            let x: Vec<f64> = keep.iter().map(|&j| s.x()[j]).collect();
            LabeledSample::new(x, s.y())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Dataset::new(samples)?)
}

struct BenchRow {
    split: usize,
    eps_robust: f64,
    eps_penalized: f64,
    ccr: [f64; 3],
    cvar: [f64; 3],
}

/// Experiment 3: benchmark CSV, 60/40 splits, radii chosen on an inner
/// validation holdout; compares robust, norm-penalized, and plain fits.
fn benchmark_splits(ctx: &Ctx, args: &ExperimentArgs) -> CliResult<()> {
    let data_path = ctx
        .cfg
        .resolve_path(args.data.as_deref(), "data")
        .unwrap_or_else(|| std::path::PathBuf::from("data/ionosphere.csv"));
    if !data_path.exists() {
        return Err(CliError::io(format!(
            "experiment 3 needs a benchmark dataset and none was found. Expected files:\n  \
             {}\n\
             Fix: download the 351-row radar returns file (34 numeric columns plus a final \
             g/b label), save it at that path, or point --data (or `data =` in the config) \
             at it.",
            data_path.display()
        )));
    }
    let runs = ctx.cfg.resolve(args.runs, "runs", 20usize)?;
    if runs == 0 {
        return Err(CliError::usage("runs must be at least 1".to_string()));
    }
    let radius_grid = ctx.cfg.resolve_with(
        args.grid.as_deref(),
        "grid",
        parse_grid("log:1e-4:0.5:10")?,
        parse_grid,
    )?;

    let full = drop_constant_columns(&load_dataset(&data_path, None)?)?;
    let metric = MetricParams::new(NormKind::L1, Kappa::Finite(1.0))?;

    let results: Vec<BenchRow> = (0..runs)
        .into_par_iter()
        .map(|s| -> CliResult<BenchRow> {
            let outer = SplitSpec {
                size: SplitSize::Fraction(0.6),
                seed: mix_seed(ctx.seed, 100 + s as u64),
            };
            let (train_raw, test_raw) = split(&full, &outer)?;
            let scaler = Standardizer::fit(&train_raw)?;
            let train = scaler.apply(&train_raw)?;
            let test = scaler.apply(&test_raw)?;

            let inner = SplitSpec {
                size: SplitSize::Fraction(0.75),
                seed: mix_seed(ctx.seed, 200 + s as u64),
            };
            let (fit_part, val_part) = split(&train, &inner)?;
            let pick = |robust: bool| -> CliResult<f64> {
                let mut best = (f64::NEG_INFINITY, radius_grid[0]);
                for &eps in &radius_grid {
                    let model = if robust {
                        train_drlr(&fit_part, &TrainConfig::new(eps, metric)?)?
                    } else {
                        train_regularized(&fit_part, eps, NormKind::L1)?
                    };
                    let ccr = evaluate(&model.beta, &val_part, &[1.0], false)?.ccr;
                    if ccr > best.0 {
                        best = (ccr, eps);
                    }
                }
                Ok(best.1)
            };

            let eps_robust = pick(true)?;
            let eps_penalized = pick(false)?;
            let robust = train_drlr(&train, &TrainConfig::new(eps_robust, metric)?)?;
            let penalized = train_regularized(&train, eps_penalized, NormKind::L1)?;
            let plain = train_classical(&train)?;

            let mut ccr = [0.0; 3];
            let mut cvar = [0.0; 3];
            for (k, model) in [&robust, &penalized, &plain].iter().enumerate() {
                let summary = evaluate(&model.beta, &test, &[0.05], false)?;
                ccr[k] = summary.ccr;
                cvar[k] = summary.cvar[0].value;
            }
            Ok(BenchRow {
                split: s,
                eps_robust,
                eps_penalized,
                ccr,
                cvar,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.split.to_string(),
                fmt_f64(r.eps_robust),
                fmt_f64(r.eps_penalized),
                fmt_f64(r.ccr[0]),
                fmt_f64(r.ccr[1]),
                fmt_f64(r.ccr[2]),
                fmt_f64(r.cvar[0]),
                fmt_f64(r.cvar[1]),
                fmt_f64(r.cvar[2]),
            ]
        })
        .collect();
    write_csv(
        &ctx.path("splits.csv"),
        "split,eps_robust,eps_penalized,ccr_robust,ccr_penalized,ccr_plain,cvar_robust,cvar_penalized,cvar_plain",
        &rows,
    )?;

    let nf = results.len() as f64;
    let mean = |f: &dyn Fn(&BenchRow) -> f64| results.iter().map(f).sum::<f64>() / nf;
    let mean_ccr = json!({
        "robust": mean(&|r| r.ccr[0]),
        "penalized": mean(&|r| r.ccr[1]),
        "plain": mean(&|r| r.ccr[2]),
    });
    let mean_cvar = json!({
        "robust": mean(&|r| r.cvar[0]),
        "penalized": mean(&|r| r.cvar[1]),
        "plain": mean(&|r| r.cvar[2]),
    });
    let manifest = Manifest {
        run: ctx.run_info("experiment-3"),
        config: json!({
            "data": data_path.display().to_string(),
            "splits": runs,
            "radius_grid": radius_grid,
            "norm": NormKind::L1,
            "kappa": 1.0,
            "outer_train_fraction": 0.6,
            "inner_fit_fraction": 0.75,
        }),
        outputs: vec!["splits.csv".to_string()],
        summary: json!({
            "chosen_radii_robust": results.iter().map(|r| r.eps_robust).collect::<Vec<_>>(),
            "chosen_radii_penalized": results.iter().map(|r| r.eps_penalized).collect::<Vec<_>>(),
            "mean_ccr": mean_ccr,
            "mean_cvar05": mean_cvar,
        }),
    };
    write_json(&ctx.path("manifest.json"), &manifest)?;
    println!(
        "experiment 3 done: {} splits, mean accuracy robust {:.2}% / penalized {:.2}% / plain {:.2}%",
        results.len(),
        100.0 * mean(&|r| r.ccr[0]),
        100.0 * mean(&|r| r.ccr[1]),
        100.0 * mean(&|r| r.ccr[2]),
    );
    Ok(())
}
