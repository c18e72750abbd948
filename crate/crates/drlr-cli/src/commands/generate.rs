use super::Ctx;
use crate::artifacts::{fmt_f64, write_json, Manifest};
use crate::cli::GenerateArgs;
use crate::config::parse_beta;
use crate::error::CliResult;
use drlr::data::{generate, BetaTrue, SyntheticSpec};
use serde_json::json;

pub fn run(ctx: &Ctx, args: &GenerateArgs) -> CliResult<()> {
    let n = ctx.cfg.resolve(args.n, "n", 10usize)?;
    let count = ctx.cfg.resolve(args.count, "count", 100usize)?;
    let beta =
        ctx.cfg
            .resolve_with(args.beta.as_deref(), "beta", BetaTrue::UniformSphere, |s| {
                parse_beta(s)
            })?;

    let spec = SyntheticSpec::new(n, beta, ctx.seed)?;
    let data = generate(&spec, count)?;

    let rows: Vec<Vec<String>> = data
        .iter()
        .map(|s| {
            let mut row: Vec<String> = s.x().iter().map(|v| fmt_f64(*v)).collect();
            row.push(if s.y().signum() > 0.0 { "1" } else { "-1" }.to_string());
            row
        })
        .collect();
    // headerless: features first, label last, matching what `train` expects
    let mut text = String::new();
    for row in &rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let csv_path = ctx.path("dataset.csv");
    std::fs::write(&csv_path, text).map_err(|e| {
        crate::error::CliError::io(format!("cannot write {}: {e}", csv_path.display()))
    })?;

    let manifest = Manifest {
        run: ctx.run_info("generate"),
        config: json!({
            "n": n,
            "count": count,
            "beta_true": spec.beta_true,
            "resolved_beta": spec.resolve_beta(),
        }),
        outputs: vec!["dataset.csv".to_string()],
        summary: json!({
            "samples": data.len(),
            "positive_fraction": data.iter().filter(|s| s.y().signum() > 0.0).count() as f64
                / data.len() as f64,
        }),
    };
    write_json(&ctx.path("manifest.json"), &manifest)?;
    println!(
        "wrote {} samples in {} dimensions to {}",
        count,
        n,
        csv_path.display()
    );
    Ok(())
}
