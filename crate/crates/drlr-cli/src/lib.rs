pub mod artifacts;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;

use clap::error::ErrorKind;
use clap::Parser;
use cli::{Cli, Command};
use commands::Ctx;
use config::FileConfig;
use error::{CliError, CliResult};
use std::time::Instant;

/// Parses argv, runs the requested command, and returns the process exit
/// code (0 ok, 1 usage, 2 non-convergence, 3 I/O).
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = cfg.resolve(cli.seed, "seed", 0u64)?;
    let threads = cfg.resolve(cli.threads, "threads", 0usize)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot size the thread pool: {e}")))?;
    }
    let out_dir = cfg
        .resolve_path(cli.out_dir.as_deref(), "out_dir")
        .unwrap_or_else(|| std::path::PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", out_dir.display())))?;
    let ctx = Ctx {
        seed,
        out_dir,
        threads,
        cfg,
        started: Instant::now(),
    };
    match &cli.command {
        Command::Generate(args) => commands::generate::run(&ctx, args),
        Command::Train(args) => commands::train::run(&ctx, args),
        Command::Risk(args) => commands::risk::run(&ctx, args),
        Command::Calibrate(args) => commands::calibrate::run(&ctx, args),
        Command::Experiment(args) => commands::experiment::run(&ctx, args),
    }
}
