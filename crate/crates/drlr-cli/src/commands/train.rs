use super::{load_dataset, Ctx};
use crate::artifacts::{mode_tag, write_json, Manifest, TrainArtifact};
use crate::cli::TrainArgs;
use crate::config::{parse_kappa, parse_norm};
use crate::error::{CliError, CliResult};
use drlr::data::Standardizer;
use drlr::norms::NormKind;
use drlr::solver::{train_drlr, TrainConfig};
use drlr::types::{Kappa, MetricParams};
use serde_json::json;

pub fn run(ctx: &Ctx, args: &TrainArgs) -> CliResult<()> {
    // parameter errors (exit 1) before any filesystem access (exit 3)
    let epsilon = ctx.cfg.resolve(args.epsilon, "epsilon", 0.0f64)?;
    let norm = ctx
        .cfg
        .resolve_with(args.norm.as_deref(), "norm", NormKind::L2, parse_norm)?;
    let kappa = ctx
        .cfg
        .resolve_with(args.kappa.as_deref(), "kappa", Kappa::Finite(1.0), |s| {
            parse_kappa(s)
        })?;
    let metric = MetricParams::new(norm, kappa)?;
    let mut config = TrainConfig::new(epsilon, metric)?;
    config.max_iters = ctx
        .cfg
        .resolve(args.max_iters, "max_iters", config.max_iters)?;
    config.obj_tol = ctx.cfg.resolve(args.obj_tol, "obj_tol", config.obj_tol)?;
    let label_column = ctx
        .cfg
        .resolve_optional(args.label_column, "label_column")?;
    let standardize = if args.standardize {
        true
    } else {
        ctx.cfg.resolve(None, "standardize", false)?
    };

    let data_path = ctx
        .cfg
        .resolve_path(args.data.as_deref(), "data")
        .ok_or_else(|| {
            CliError::usage("train needs a dataset: pass --data FILE or set `data =` in the config")
        })?;
    let raw = load_dataset(&data_path, label_column)?;
    let (data, standardizer) = if standardize {
        let scaler = Standardizer::fit(&raw)?;
        (scaler.apply(&raw)?, Some(scaler))
    } else {
        (raw, None)
    };

    let model = train_drlr(&data, &config)?;
    let mode = mode_tag(epsilon, kappa);
    let converged = model.converged;
    let iterations = model.iterations;
    let j_hat = model.j_hat;

    let artifact = TrainArtifact {
        run: ctx.run_info("train"),
        mode: mode.to_string(),
        data_path: data_path.display().to_string(),
        standardizer,
        model,
    };
    write_json(&ctx.path("model.json"), &artifact)?;
    let manifest = Manifest {
        run: ctx.run_info("train"),
        config: json!({
            "data": artifact.data_path,
            "epsilon": epsilon,
            "norm": norm,
            "kappa": kappa.as_f64(),
            "standardize": standardize,
            "max_iters": config.max_iters,
            "obj_tol": config.obj_tol,
        }),
        outputs: vec!["model.json".to_string()],
        summary: json!({
            "mode": mode,
            "objective": j_hat,
            "iterations": iterations,
            "converged": converged,
            "samples": data.len(),
            "dim": data.dim(),
        }),
    };
    write_json(&ctx.path("manifest.json"), &manifest)?;

    if !converged {
        return Err(CliError::NonConvergence(format!(
            "fit stopped after {iterations} iterations without meeting the tolerances; \
             artifacts were still written to {}",
            ctx.out_dir.display()
        )));
    }
    println!(
        "trained {mode} model on {} samples: objective {j_hat:.6}, {iterations} iterations",
        data.len()
    );
    Ok(())
}
