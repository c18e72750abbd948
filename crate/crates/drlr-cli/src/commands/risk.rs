use super::{load_dataset, Ctx};
use crate::artifacts::{fmt_f64, read_json, write_csv, write_json, Manifest, TrainArtifact};
use crate::cli::RiskArgs;
use crate::config::parse_grid;
use crate::error::{CliError, CliResult};
use drlr::risk::{empirical_risk, risk_bounds};
use serde_json::json;
use std::path::PathBuf;

fn default_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    let (lo, hi, count) = (1e-4f64, 1.0f64, 30usize);
    let step = (hi / lo).ln() / (count - 1) as f64;
    grid.extend((0..count).map(|i| lo * (step * i as f64).exp()));
    grid
}

pub fn run(ctx: &Ctx, args: &RiskArgs) -> CliResult<()> {
    let model_path = ctx
        .cfg
        .resolve_path(args.model.as_deref(), "model")
        .unwrap_or_else(|| ctx.path("model.json"));
    if !model_path.exists() {
        return Err(CliError::io(format!(
            "model artifact not found: {} (train first, or pass --model)",
            model_path.display()
        )));
    }
    let artifact: TrainArtifact = read_json(&model_path)?;

    let data_path = ctx
        .cfg
        .resolve_path(args.data.as_deref(), "data")
        .unwrap_or_else(|| PathBuf::from(&artifact.data_path));
    let label_column = ctx
        .cfg
        .resolve_optional(args.label_column, "label_column")?;
    let raw = load_dataset(&data_path, label_column)?;
    let data = match &artifact.standardizer {
        Some(scaler) => scaler.apply(&raw)?,
        None => raw,
    };

    let grid = ctx
        .cfg
        .resolve_with(args.grid.as_deref(), "grid", default_grid(), parse_grid)?;
    let metric = artifact.model.config_echo.metric;

    let mut rows = Vec::with_capacity(grid.len());
    for &epsilon in &grid {
        let bounds = risk_bounds(&artifact.model.beta, &data, epsilon, &metric)?;
        rows.push(vec![
            fmt_f64(bounds.epsilon),
            fmt_f64(bounds.risk_min),
            fmt_f64(bounds.risk_max),
            fmt_f64(bounds.lambda_star_min),
            fmt_f64(bounds.lambda_star_max),
        ]);
    }
    write_csv(
        &ctx.path("risk.csv"),
        "epsilon,risk_min,risk_max,lambda_star_min,lambda_star_max",
        &rows,
    )?;

    let empirical = empirical_risk(&artifact.model.beta, &data)?;
    let manifest = Manifest {
        run: ctx.run_info("risk"),
        config: json!({
            "model": model_path.display().to_string(),
            "data": data_path.display().to_string(),
            "grid": grid,
            "norm": metric.norm,
            "kappa": metric.kappa.as_f64(),
        }),
        outputs: vec!["risk.csv".to_string()],
        summary: json!({
            "mode": artifact.mode,
            "empirical_risk": empirical,
            "samples": data.len(),
            "radii": grid.len(),
        }),
    };
    write_json(&ctx.path("manifest.json"), &manifest)?;
    println!(
        "certified {} radii on {} samples: empirical risk {empirical:.4}, widest interval [{}, {}]",
        grid.len(),
        data.len(),
        rows.last().map(|r| r[1].clone()).unwrap_or_default(),
        rows.last().map(|r| r[2].clone()).unwrap_or_default(),
    );
    Ok(())
}
