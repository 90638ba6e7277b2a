//! `latgame` — experiment runner for lattice strategy dynamics.
//!
//! Exit codes: 0 success; 1 bad configuration or arguments; 2 the
//! verification suite reported a failed check; 3 runtime or IO failure.

use clap::Parser;
use latgame::config::load_config;
use latgame::{run_experiment, HarnessError, Mode, ResolvedRun, RunSummary};
use std::path::PathBuf;
use std::process::ExitCode;

/// Seed override read from the environment when no `--master-seed` flag
/// is given; the flag wins over both the environment and the config file.
const SEED_ENV: &str = "LATGAME_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "latgame",
    about = "Simulation and verification experiments for lattice strategy dynamics",
    version
)]
struct Cli {
    /// Experiment mode; may instead come from the config file's `mode`
    /// key, but when both are given they must agree.
    #[arg(value_enum)]
    mode: Option<Mode>,

    /// Path to a `key = value` config file.
    #[arg(short, long)]
    config: PathBuf,

    /// Where artifacts go (overrides the config file's `output_dir`).
    #[arg(long, visible_alias = "out")]
    output_dir: Option<PathBuf>,

    /// Master seed (overrides LATGAME_SEED and the config file).
    #[arg(long)]
    master_seed: Option<u64>,

    /// Number of replicas (overrides the config file).
    #[arg(long)]
    seeds: Option<u64>,

    /// Worker threads (overrides the config file).
    #[arg(long)]
    workers: Option<usize>,
}

fn resolve(cli: Cli) -> Result<ResolvedRun, HarnessError> {
    let mut config = load_config(&cli.config)?;

    let mode = match (cli.mode, config.mode) {
        (Some(flag), Some(file)) if flag != file => {
            return Err(HarnessError::Config(format!(
                "mode `{}` on the command line but `{}` in the config file",
                flag.name(),
                file.name()
            )));
        }
        (Some(mode), _) | (None, Some(mode)) => mode,
        (None, None) => {
            return Err(HarnessError::Config(
                "no mode: pass one on the command line or set `mode` in the config".into(),
            ));
        }
    };

    if let Ok(raw) = std::env::var(SEED_ENV) {
        let seed = raw.parse::<u64>().map_err(|_| {
            HarnessError::Config(format!("{SEED_ENV} must be an unsigned integer, got `{raw}`"))
        })?;
        config.master_seed = Some(seed);
    }
    if let Some(seed) = cli.master_seed {
        config.master_seed = Some(seed);
    }
    if let Some(seeds) = cli.seeds {
        if seeds == 0 {
            return Err(HarnessError::Config("--seeds must be at least 1".into()));
        }
        config.seeds = seeds;
    }
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(HarnessError::Config("--workers must be at least 1".into()));
        }
        config.workers = workers;
    }

    let output_dir = cli
        .output_dir
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| {
            HarnessError::Config(
                "no output directory: set `output_dir` in the config or pass --output-dir".into(),
            )
        })?;

    Ok(ResolvedRun {
        mode,
        config,
        output_dir,
    })
}

fn run() -> Result<RunSummary, HarnessError> {
    run_experiment(&resolve(Cli::parse())?)
}

fn main() -> ExitCode {
    match run() {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            if summary.verify_failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
