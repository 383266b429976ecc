use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use siot_core::config::{ConfigFile, MobilityMode, Network, SimulationConfig, Strategy};
use siot_core::engine::{run_batch, run_observed, write_positions_rows, write_snapshot_csv, Execution};
use siot_core::error::{ConfigError, Violation};
use siot_core::output::write_batch_artifacts;
use siot_core::scenario::{cells, scenario_table, Cell, CASE_COUNT};

const EXIT_PARTIAL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_IO: u8 = 3;

/// Seeded simulator of service sharing among mobile social IoT peers.
///
/// Runs a batch of replicates of one configuration, or (with `--matrix` or
/// `--cases`) every case x mobility cell of the built-in scenario table.
#[derive(Debug, Parser)]
#[command(name = "siot-sim", version, args_override_self = true)]
struct Args {
    /// TOML configuration file; flags given on the command line win over it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    #[arg(long)]
    population: Option<usize>,
    /// Communication radius in grid units.
    #[arg(long)]
    radius: Option<f64>,
    /// mesh | regular | small-world
    #[arg(long)]
    network: Option<Network>,
    /// Long-link probability for small-world networks.
    #[arg(long)]
    beta: Option<f64>,
    /// competitive | cooperative | cooperative-restricted
    #[arg(long)]
    strategy: Option<Strategy>,
    /// stationary | random | profile
    #[arg(long)]
    mobility: Option<MobilityMode>,
    /// Replicates per configuration (or per cell in matrix mode).
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Base seed; replicate i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Horizon in days.
    #[arg(long)]
    days: Option<u32>,
    /// Share of neighbours promoted to contacts.
    #[arg(long)]
    k: Option<f64>,
    /// Share of contacts promoted to friends.
    #[arg(long)]
    m: Option<f64>,
    /// Iterations between social consolidations.
    #[arg(long)]
    consolidate_frequency: Option<u64>,

    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Run the scenario matrix.
    #[arg(long)]
    matrix: bool,
    /// Comma-separated case ids to run in matrix mode (implies --matrix).
    #[arg(long, value_delimiter = ',', value_name = "IDS")]
    cases: Option<Vec<u8>>,
    /// Cap on parallel replicates (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Dump statuses and positions of replicate 0 at this iteration.
    #[arg(long, value_name = "N")]
    snapshot_at: Option<u64>,
    /// Write every position of replicate 0 at every iteration to positions.csv.
    #[arg(long)]
    positions_trace: bool,
    /// Print the scenario table and exit.
    #[arg(long)]
    print_matrix: bool,
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn effective_config(args: &Args) -> Result<SimulationConfig, ConfigError> {
    let mut cfg = SimulationConfig::default();
    if let Some(path) = &args.config {
        ConfigFile::load(path)?.apply_to(&mut cfg);
    }
    macro_rules! flag {
        ($field:expr, $value:expr) => {
            if let Some(v) = $value {
                $field = v;
            }
        };
    }
    flag!(cfg.population, args.population);
    flag!(cfg.radius, args.radius);
    flag!(cfg.network, args.network);
    flag!(cfg.beta, args.beta);
    flag!(cfg.strategy, args.strategy);
    flag!(cfg.mobility, args.mobility);
    flag!(cfg.seed, args.seed);
    flag!(cfg.horizon_days, args.days);
    flag!(cfg.k, args.k);
    flag!(cfg.m, args.m);
    flag!(cfg.consolidate_frequency, args.consolidate_frequency);
    Ok(cfg)
}

fn check_flags(args: &Args, cfg: &SimulationConfig) -> Result<(), ConfigError> {
    let mut v = cfg.validate().err().map(|e| e.violations().to_vec()).unwrap_or_default();
    if args.runs == 0 {
        v.push(Violation::new("runs", "must be at least 1"));
    }
    if args.workers == Some(0) {
        v.push(Violation::new("workers", "must be at least 1"));
    }
    if let Some(ids) = &args.cases {
        for &id in ids {
            if !(1..=CASE_COUNT).contains(&id) {
                v.push(Violation::new("cases", format!("no case {id} (expected 1..={CASE_COUNT})")));
            }
        }
    }
    if let Some(n) = args.snapshot_at {
        if n > cfg.horizon_iterations() {
            v.push(Violation::new(
                "snapshot_at",
                format!("iteration {n} is past the horizon ({})", cfg.horizon_iterations()),
            ));
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(ConfigError::Invalid(v))
    }
}

/// Runs one configuration into `dir`; returns the written paths.
fn run_into(dir: &Path, cfg: &SimulationConfig, args: &Args) -> Result<Vec<PathBuf>, Failure> {
    let exec = Execution::Parallel { workers: args.workers };
    let batch = run_batch(cfg, args.runs, exec)?;
    let artifacts = write_batch_artifacts(dir, cfg, &batch).map_err(io_err(dir))?;
    let mut paths: Vec<PathBuf> = artifacts.all_paths().cloned().collect();

    if args.snapshot_at.is_some() || args.positions_trace {
        let snapshot_path = args.snapshot_at.map(|n| dir.join(format!("snapshot_{n}.csv")));
        let trace_path = dir.join("positions.csv");
        let mut trace = if args.positions_trace {
            let mut w = BufWriter::new(File::create(&trace_path).map_err(io_err(&trace_path))?);
            writeln!(w, "iteration,peer_id,x,y").map_err(io_err(&trace_path))?;
            Some(w)
        } else {
            None
        };
        let mut result = Ok(());
        run_observed(cfg, cfg.seed, |world| {
            if result.is_err() {
                return;
            }
            let it = world.iteration();
            if let Some(w) = trace.as_mut() {
                result = write_positions_rows(it, world.positions(), w).map_err(io_err(&trace_path));
            }
            if let (Some(path), Some(n)) = (&snapshot_path, args.snapshot_at) {
                if it == n && result.is_ok() {
                    result = File::create(path)
                        .and_then(|f| write_snapshot_csv(it, &world.snapshot(), BufWriter::new(f)))
                        .map_err(io_err(path));
                }
            }
        })?;
        result?;
        if let Some(mut w) = trace {
            w.flush().map_err(io_err(&trace_path))?;
            paths.push(trace_path);
        }
        paths.extend(snapshot_path);
    }
    Ok(paths)
}

fn relative(path: &Path, root: &Path) -> String {
    path.strip_prefix(root).unwrap_or(path).display().to_string()
}

fn run_matrix(base: &SimulationConfig, args: &Args) -> Result<ExitCode, Failure> {
    let selected = cells(args.cases.as_deref());
    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for cell in selected {
        let Cell { row, mobility } = cell;
        let label = cell.label();
        let cfg = row.apply(base, mobility);
        let dir = args.out.join(&label);
        eprintln!("{label}: {row}, {mobility}");
        match run_into(&dir, &cfg, args) {
            Ok(paths) => entries.push(json!({
                "case_id": row.case_id,
                "mobility": mobility.to_string(),
                "label": label,
                "dir": relative(&dir, &args.out),
                "files": paths.iter().map(|p| relative(p, &args.out)).collect::<Vec<_>>(),
            })),
            Err(Failure::Invalid(msg) | Failure::Io(msg)) => {
                eprintln!("error: {label}: {msg}");
                failures.push(json!({ "label": label, "error": msg }));
            }
        }
    }
    let index = json!({
        "runs": args.runs,
        "seed": base.seed,
        "cells": entries,
        "failures": failures,
    });
    let path = args.out.join("index.json");
    let text = serde_json::to_string_pretty(&index).expect("json values serialize");
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    println!("{}", path.display());
    Ok(if index["failures"].as_array().is_some_and(|f| !f.is_empty()) {
        ExitCode::from(EXIT_PARTIAL)
    } else {
        ExitCode::SUCCESS
    })
}

fn execute(args: &Args) -> Result<ExitCode, Failure> {
    if args.print_matrix {
        for row in scenario_table() {
            println!("{row}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let cfg = effective_config(args)?;
    check_flags(args, &cfg)?;
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    if args.matrix || args.cases.is_some() {
        return run_matrix(&cfg, args);
    }
    let paths = run_into(&args.out, &cfg, args)?;
    for p in paths {
        println!("{}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
