use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use polyent::experiment::{
    reproduce_theorem_a, reproduce_theorem_b, run, run_singular, ExperimentConfig, Method, Report,
};

/// Polynomial entropy of interval and circle homeomorphisms and their induced
/// maps on hyperspaces.
///
/// Exit status: 0 when every expected value is met, 1 when an estimate falls
/// outside its band, 2 on configuration or runtime errors. POLYENT_THREADS
/// caps the worker pool.
#[derive(Parser)]
#[command(name = "polyent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory for report.json, counts.csv and words.txt.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Grid step of the sample clouds; overrides the per-target defaults.
    #[arg(long, global = true, value_name = "R")]
    resolution: Option<f64>,
    /// Largest k for the symmetric products (theorem harnesses).
    #[arg(long, global = true, value_name = "K", default_value_t = 3)]
    kmax: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check the configuration and the map, print the fixed points.
    Validate,
    /// Run the configured target with the configured method.
    Entropy,
    /// Run the configured target on the coding route only.
    Coding,
    /// Decide whether the configured pair of letters is mutually singular.
    Singular,
    /// Base, C(f) and f^{*k} for an interval map.
    TheoremA,
    /// Base, C(f) with its invariant pieces and f^{*k} for a circle map.
    TheoremB,
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let path = common.config.as_ref().context("--config is required")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = ExperimentConfig::from_json(&text).with_context(|| format!("in {}", path.display()))?;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(r) = common.resolution {
        cfg.resolution = Some(r);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn finish(report: Report, common: &Common) -> Result<bool> {
    report.write(common.out.as_deref())?;
    print!("{}", report.summary());
    eprintln!("wall time {:.1} s", report.wall_time);
    Ok(report.passed)
}

fn execute(cli: &Cli) -> Result<bool> {
    let common = &cli.common;
    let cfg = load(common)?;
    match cli.command {
        Command::Validate => {
            let f = cfg.map.build_checked()?;
            println!(
                "ok: {} map, {}, fixed points {:?}",
                f.space(),
                if f.is_preserving() { "preserving" } else { "reversing" },
                f.fixed_points()
            );
            Ok(true)
        }
        Command::Entropy => finish(run(&cfg)?, common),
        Command::Coding => {
            let cfg = ExperimentConfig {
                method: Method::Coding,
                ..cfg
            };
            finish(run(&cfg)?, common)
        }
        Command::Singular => {
            let v = run_singular(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(v.pass != Some(false))
        }
        Command::TheoremA => finish(reproduce_theorem_a(&cfg, common.kmax)?, common),
        Command::TheoremB => finish(reproduce_theorem_b(&cfg, common.kmax)?, common),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = std::env::var("POLYENT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("POLYENT_THREADS ignored: {e}");
        }
    }
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
