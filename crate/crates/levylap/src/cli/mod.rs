//! Command-line driver: argument parsing, config resolution, worker-pool
//! setup, and dispatch to the experiment commands.
//!
//! Configuration precedence, lowest to highest: built-in defaults, the
//! `--config` file, repeated `--set key=value` overrides, then the dedicated
//! `--seed`, `--workers`, and `--out` flags. The only environment variable
//! read is `RESULTS_DIR`, the fallback root for output directories.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod manifest;

use crate::cli::commands::CommandOutcome;
use crate::cli::config::ConfigMap;
use crate::{Error, Result};
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "levylap",
    version,
    about = "Heavy-tailed random Laplacian spectra: sampling, limiting equations, and cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config key `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 or absent means one per core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory (overrides the config key `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Extra config overrides, repeatable: --set key=value.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Sample matrices and export spectra, the pooled spectral measure, and
    /// its transform.
    SampleSpectrum,
    /// Solve the limiting distributional equation by population dynamics.
    SolveRde,
    /// Monte Carlo over truncated trees at one spectral parameter.
    TreeMc,
    /// Solve the Gaussian-semicircle free-convolution fixed point.
    FreeConv,
    /// Align two prior runs and test their sup distance against a tolerance.
    Compare,
    /// Export off-diagonal row sums and distances to the limiting law.
    RowSums,
    /// Check the summability condition and emit the certificate.
    VerifyC1,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::SampleSpectrum => "sample-spectrum",
            Command::SolveRde => "solve-rde",
            Command::TreeMc => "tree-mc",
            Command::FreeConv => "free-conv",
            Command::Compare => "compare",
            Command::RowSums => "row-sums",
            Command::VerifyC1 => "verify-c1",
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<ConfigMap> {
    let mut cfg = match &cli.config {
        Some(path) => ConfigMap::from_file(path)?,
        None => ConfigMap::new(),
    };
    for pair in &cli.set {
        cfg.apply_override(pair)?;
    }
    if let Some(seed) = cli.seed {
        cfg.set("seed", &seed.to_string());
    }
    if let Some(workers) = cli.workers {
        cfg.set("workers", &workers.to_string());
    }
    if let Some(out) = &cli.out {
        cfg.set("out", &out.display().to_string());
    }
    Ok(cfg)
}

fn resolve_out_dir(cfg: &ConfigMap, command: &str) -> PathBuf {
    if let Some(out) = cfg.get("out") {
        return PathBuf::from(out);
    }
    let root = std::env::var("RESULTS_DIR").unwrap_or_else(|_| "results".to_string());
    PathBuf::from(root).join(command)
}

/// Runs `f` on a private pool of `workers` threads (0 = one per core).
/// Streams are derived per task index, so the pool size never changes any
/// output byte.
pub fn with_worker_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("worker pool construction cannot fail for sane sizes");
    pool.install(f)
}

fn dispatch(command: Command, cfg: &ConfigMap) -> Result<CommandOutcome> {
    let dir = resolve_out_dir(cfg, command.name());
    std::fs::create_dir_all(&dir)?;
    let workers = cfg.usize_or("workers", 0)?;
    with_worker_pool(workers, || match command {
        Command::SampleSpectrum => commands::cmd_sample_spectrum(cfg, &dir),
        Command::SolveRde => commands::cmd_solve_rde(cfg, &dir),
        Command::TreeMc => commands::cmd_tree_mc(cfg, &dir),
        Command::FreeConv => commands::cmd_free_conv(cfg, &dir),
        Command::Compare => commands::cmd_compare(cfg, &dir),
        Command::RowSums => commands::cmd_row_sums(cfg, &dir),
        Command::VerifyC1 => commands::cmd_verify_c1(cfg, &dir),
    })
}

/// Parses arguments, runs the selected command, prints the outcome, and
/// returns the process exit code: 0 iff the run succeeded and every
/// configured tolerance passed.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let cfg = match resolve_config(&cli) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err}");
            return 2;
        }
    };
    match dispatch(cli.command, &cfg) {
        Ok(outcome) => {
            println!(
                "{}: {} ({})",
                cli.command.name(),
                outcome.summary,
                outcome.dir.display()
            );
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            if let Error::Summability { report, .. } = &err {
                eprintln!("{report:#?}");
            }
            2
        }
    }
}
