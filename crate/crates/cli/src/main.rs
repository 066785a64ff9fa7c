use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fabric_core::runner::{self, emit_plot, exit_code, Command, ScenarioConfig};
use fabric_core::{Error, Result};

/// Population size used when no config file is given.
const DEFAULT_N: usize = 2_000;

#[derive(Debug, Parser)]
#[command(name = "fabric", version, about = "Social-fabric network simulations")]
struct Cli {
    /// Scenario config (flat `section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Equilibrium and sampled networks at the configured parameters.
    Simulate,
    /// Sweep `sweep.param` over `[sweep.from, sweep.to]`.
    Sweep,
    /// Grid over link deletion `q` and silent share `Q`.
    Percolation,
    /// Household coordination thresholds and equilibrium case.
    Household,
    /// Reward probability through a second community.
    CrossCommunity,
    /// Equilibria of strategic gossip on sampled networks.
    ClassifySpreading,
    /// Line chart of CSV columns as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: String,
        /// Comma-separated column names.
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<String>,
        /// Defaults to `<out>/plot.svg`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig> {
    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::with_n(DEFAULT_N),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(threads) = cli.threads {
        config.threads = Some(threads);
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let command = match &cli.command {
        Sub::Simulate => Command::Simulate,
        Sub::Sweep => Command::Sweep,
        Sub::Percolation => Command::Percolation,
        Sub::Household => Command::Household,
        Sub::CrossCommunity => Command::CrossCommunity,
        Sub::ClassifySpreading => Command::ClassifySpreading,
        Sub::Plot { input, x, y, output } => {
            let out_dir = match (&cli.out, &cli.config) {
                (Some(dir), _) => dir.clone(),
                (None, Some(_)) => load_config(cli)?.out,
                (None, None) => PathBuf::from("out"),
            };
            let output = output.clone().unwrap_or_else(|| out_dir.join("plot.svg"));
            if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Error::Io {
                    path: parent.to_path_buf(),
                    source: e,
                })?;
            }
            let ys: Vec<&str> = y.iter().map(String::as_str).collect();
            emit_plot(input, x, &ys, &output)?;
            return Ok(vec![output]);
        }
    };
    runner::run_scenario(&load_config(cli)?, command)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
