//! `fiolab`: experiment runner for the Fourier integral operator laboratory.
//!
//! Each subcommand reads an optional flat config, runs one experiment and
//! writes `config.txt` (the effective config), `summary.json` and CSV tables
//! into the output directory. Exit status: 0 success, 2 validation error,
//! 3 numerical precondition failure, 1 anything else.

mod config;
mod experiments;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use config::{parse_pairs, Config};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Other(String),
}

impl From<fiolab::Error> for RunError {
    fn from(e: fiolab::Error) -> Self {
        use fiolab::Error as E;
        match e {
            E::Config(m) | E::Usage(m) | E::Capability(m) | E::Parse(m) => RunError::Validation(m),
            E::Precondition(m) | E::Domain(m) => RunError::Precondition(m),
            E::Io(e) => RunError::Other(e.to_string()),
        }
    }
}

impl RunError {
    fn code(&self) -> u8 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Precondition(_) => 3,
            RunError::Other(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "fiolab", version, about = "Numerical experiments on Fourier integral operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for probe families; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operator directly and optionally through the decomposition.
    Apply(Common),
    /// Weighted decay of a low-frequency kernel.
    Kernel(Common),
    /// Operator-norm growth across grid refinements.
    Sweep(Common),
    /// Singularity exponent of the counterexample family.
    Ce2(Common),
    /// Muckenhoupt constant of a weight.
    Weights(Common),
    /// BMO oscillation of a function.
    Bmo(Common),
    /// Decay of an oscillatory integral.
    Stationary(Common),
    /// Wave-equation solution and Sobolev-loss sweep.
    Wave(Common),
    /// Commutator norms across refinements.
    Commutator(Common),
    /// Pushforward density of a bi-Lipschitz map.
    Substitution(Common),
    /// Run the kind named by `kind` in the config.
    Run(Common),
}

fn split(cmd: Command) -> (Option<&'static str>, Common) {
    match cmd {
        Command::Apply(c) => (Some("apply"), c),
        Command::Kernel(c) => (Some("kernel"), c),
        Command::Sweep(c) => (Some("sweep"), c),
        Command::Ce2(c) => (Some("ce2"), c),
        Command::Weights(c) => (Some("weights"), c),
        Command::Bmo(c) => (Some("bmo"), c),
        Command::Stationary(c) => (Some("stationary"), c),
        Command::Wave(c) => (Some("wave"), c),
        Command::Commutator(c) => (Some("commutator"), c),
        Command::Substitution(c) => (Some("substitution"), c),
        Command::Run(c) => (None, c),
    }
}

fn load(kind: Option<&str>, common: &Common) -> Result<Config, RunError> {
    let pairs = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| RunError::Validation(format!("cannot read config {}: {e}", path.display())))?;
            parse_pairs(&text)?
        }
        None => BTreeMap::new(),
    };
    let kind = match kind {
        Some(k) => k.to_string(),
        None => pairs
            .get("kind")
            .cloned()
            .ok_or_else(|| RunError::Validation("`run` needs a config with a `kind` key".into()))?,
    };
    let mut cfg = Config::build(&kind, pairs)?;
    if let Some(seed) = common.seed {
        cfg.set("seed", seed.to_string());
    }
    cfg.get::<u64>("seed")?;
    Ok(cfg)
}

fn write_csv(path: &Path, table: &experiments::Table) -> Result<(), RunError> {
    let io = |e: csv::Error| RunError::Other(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| RunError::Other(e.to_string()))
}

fn execute(kind: Option<&str>, common: &Common) -> Result<(), RunError> {
    let cfg = load(kind, common)?;
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(RunError::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| RunError::Other(e.to_string()))?;
    }
    let other = |e: std::io::Error| RunError::Other(format!("{}: {e}", common.out.display()));
    fs::create_dir_all(&common.out).map_err(other)?;
    fs::write(common.out.join("config.txt"), cfg.echo()).map_err(other)?;

    let start = Instant::now();
    let outcome = experiments::run(&cfg)?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut tables = Vec::new();
    for t in &outcome.tables {
        let name = format!("{}.csv", t.name);
        write_csv(&common.out.join(&name), t)?;
        tables.push(Value::from(name));
    }
    let inputs: Map<String, Value> = cfg.entries().iter().map(|(k, v)| (k.clone(), Value::from(v.clone()))).collect();
    let summary = json!({
        "kind": cfg.kind,
        "inputs": inputs,
        "seed": cfg.get::<u64>("seed")?,
        "results": outcome.results,
        "tables": tables,
        "timings": { "total_s": elapsed },
    });
    let text = serde_json::to_string_pretty(&summary).map_err(|e| RunError::Other(e.to_string()))?;
    fs::write(common.out.join("summary.json"), text + "\n").map_err(other)?;
    println!("{}: wrote {} table(s) to {} in {elapsed:.2}s", cfg.kind, outcome.tables.len(), common.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = split(cli.command);
    match execute(kind, &common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fiolab: {e}");
            ExitCode::from(e.code())
        }
    }
}
