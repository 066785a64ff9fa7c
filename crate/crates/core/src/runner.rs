//! Scenario execution: configuration, sweeps, artifacts and plots.
//!
//! Every command writes its CSV table plus a `<command>_summary.json`
//! describing the schema, module versions and seeds into the output
//! directory.

pub mod config;
pub mod plot;
pub mod sweep;
pub mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{ScenarioConfig, SweepParam};
pub use plot::{emit_plot, render_plot};
pub use sweep::{
    classify_spreading, cross_community, household, simulate, sweep, sweep_f, sweep_percolation, sweep_pi_h,
    NetworkStats, PercolationRow, SpreadingRow, SweepRow,
};
pub use table::{format_sig, Table};

use crate::error::{Error, Result};
use crate::extensions::SpreadingTag;

/// Version of the CSV and JSON layouts.
pub const SCHEMA_VERSION: u32 = 1;

/// Revision of each module's numerical behaviour; bumped whenever outputs for
/// a fixed seed change.
pub const MODULE_VERSIONS: [(&str, u32); 8] = [
    ("degree_model", 1),
    ("graph", 1),
    ("percolation", 1),
    ("spread", 1),
    ("agents", 1),
    ("households", 1),
    ("extensions", 1),
    ("runner", 1),
];

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Process exit code for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Sweep,
    Percolation,
    Household,
    CrossCommunity,
    ClassifySpreading,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Percolation => "percolation",
            Command::Household => "household",
            Command::CrossCommunity => "cross-community",
            Command::ClassifySpreading => "classify-spreading",
        }
    }

    fn file_stem(self) -> &'static str {
        match self {
            Command::CrossCommunity => "cross_community",
            Command::ClassifySpreading => "spreading",
            other => other.name(),
        }
    }
}

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_thread_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Validation(format!("cannot start {k} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Serialize)]
struct Summary {
    schema_version: u32,
    crate_version: &'static str,
    command: &'static str,
    master_seed: u64,
    rng: &'static str,
    module_versions: BTreeMap<&'static str, u32>,
    outputs: Vec<String>,
    config: serde_json::Value,
    details: serde_json::Value,
}

/// Runs one command and writes its artifacts under `config.out`. Returns the
/// paths written.
pub fn run_scenario(config: &ScenarioConfig, command: Command) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let (table, stem, details) = with_thread_pool(config.threads, || compute(config, command))??;
    let dir = &config.out;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    table.write(&csv_path)?;
    let summary_path = dir.join(format!("{}_summary.json", command.file_stem()));
    write_summary(config, command, &[&csv_path], details, &summary_path)?;
    Ok(vec![csv_path, summary_path])
}

fn compute(config: &ScenarioConfig, command: Command) -> Result<(Table, String, serde_json::Value)> {
    Ok(match command {
        Command::Simulate => {
            let row = simulate(config)?;
            let table = sweep::sweep_table(std::slice::from_ref(&row), "pi_h");
            (table, "simulate".into(), json(&row.report))
        }
        Command::Sweep => {
            let param = config.sweep.param;
            let rows = sweep(config, param)?;
            let flips = rows
                .windows(2)
                .filter(|w| w[0].report.regime != w[1].report.regime)
                .count();
            let table = sweep::sweep_table(&rows, param.column());
            let details = serde_json::json!({ "param": param.column(), "rows": rows.len(), "regime_flips": flips });
            (table, format!("sweep_{}", param.column()), details)
        }
        Command::Percolation => {
            let rows = sweep_percolation(config)?;
            let details = serde_json::json!({ "cells": rows.len() });
            (sweep::percolation_table(&rows), "percolation".into(), details)
        }
        Command::Household => {
            let (report, table) = household(config)?;
            (table, "household".into(), json(&report))
        }
        Command::CrossCommunity => {
            let (estimates, table) = cross_community(config)?;
            let successes: f64 = estimates.iter().map(|e| e.p_hat * e.replications as f64).sum();
            let draws: usize = estimates.iter().map(|e| e.replications).sum();
            let pooled = crate::spread::RewardEstimate::from_counts(successes.round() as usize, draws);
            (table, "cross_community".into(), json(&pooled))
        }
        Command::ClassifySpreading => {
            let rows = classify_spreading(config)?;
            let count = |want: &[SpreadingTag]| rows.iter().filter(|r| r.equilibria == want).count();
            let details = serde_json::json!({
                "only_a": count(&[SpreadingTag::A]),
                "only_b": count(&[SpreadingTag::B]),
                "both": count(&[SpreadingTag::A, SpreadingTag::B]),
            });
            (sweep::spreading_table(&rows), "spreading".into(), details)
        }
    })
}

fn json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).unwrap_or(serde_json::Value::Null)
}

fn write_summary(
    config: &ScenarioConfig,
    command: Command,
    outputs: &[&Path],
    details: serde_json::Value,
    path: &Path,
) -> Result<()> {
    // the worker count and output location do not affect results
    let mut config_json = serde_json::to_value(config).map_err(|e| Error::Validation(e.to_string()))?;
    if let Some(map) = config_json.as_object_mut() {
        map.remove("threads");
        map.remove("out");
    }
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION"),
        command: command.name(),
        master_seed: config.master_seed,
        rng: "chacha8 stream per (master_seed, scenario, replication), key expanded with splitmix64",
        module_versions: MODULE_VERSIONS.into_iter().collect(),
        outputs: outputs
            .iter()
            .map(|p| {
                p.file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_default()
            })
            .collect(),
        config: config_json,
        details,
    };
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Validation(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dir: &Path) -> ScenarioConfig {
        let mut c = ScenarioConfig::with_n(300);
        c.replications = 2;
        c.sweep.steps = 3;
        c.out = dir.to_path_buf();
        c
    }

    #[test]
    fn writes_csv_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        let files = run_scenario(&config(dir.path()), Command::Sweep).unwrap();
        assert!(files[0].ends_with("sweep_pi_h.csv"));
        let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&files[1]).unwrap()).unwrap();
        assert_eq!(summary["schema_version"], SCHEMA_VERSION);
        assert_eq!(summary["module_versions"]["households"], 1);
        assert!(summary["config"].get("threads").is_none());
    }

    #[test]
    fn identical_bytes_across_thread_counts() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let mut ca = config(a.path());
        ca.threads = Some(1);
        let mut cb = config(b.path());
        cb.threads = Some(8);
        for command in [Command::Sweep, Command::Percolation] {
            let fa = run_scenario(&ca, command).unwrap();
            let fb = run_scenario(&cb, command).unwrap();
            for (x, y) in fa.iter().zip(&fb) {
                assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{x:?}");
            }
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Validation("x".into())), EXIT_VALIDATION);
        let io = Error::Io {
            path: "x".into(),
            source: std::io::Error::other("boom"),
        };
        assert_eq!(exit_code(&io), EXIT_IO);
    }

    #[test]
    fn unwritable_output_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "").unwrap();
        let mut c = config(dir.path());
        c.out = blocker.join("sub");
        let err = run_scenario(&c, Command::Household).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_IO);
    }
}
