// SPDX-License-Identifier: Apache-2.0

//! Command-line entry point.
//!
//! Exit status: 0 success, 1 configuration or usage error, 2 I/O error,
//! 3 oracle mismatch in `self-check`.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use tangle_sim::config::{ConfigError, SimConfig, REFERENCE_CONFIG_TOML};
use tangle_sim::metrics::{self, Aggregate, ComparisonReport, MetricsError, RunSummary};
use tangle_sim::oracle::{self, EdgeList, Fault};
use tangle_sim::sim;

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_ORACLE: u8 = 3;

const SELF_CHECK_SEED: u64 = 0x7a6e_6c65;
const SELF_CHECK_TRIALS: usize = 100;
const SELF_CHECK_MAX_SIZE: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "tangle-sim", version, about = "Tangle tip-selection simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and write trace.csv and summary.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run paired uniform/ptsa simulations over consecutive seeds.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Number of seeds, starting at the config seed.
        #[arg(long)]
        seeds: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the reference configuration.
    GenConfig {
        #[arg(long)]
        out: PathBuf,
    },
    /// Check cumulative weights against brute force and the selection branch table.
    SelfCheck {
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

enum Failure {
    Config(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Failure::Io(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::WorkloadMismatch { .. } => Failure::Config(e.to_string()),
            other => Failure::Io(other.to_string()),
        }
    }
}

fn io_failure(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(io_failure(path))
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(io_failure(dir))
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<(), Failure> {
    metrics::export_json(value, create(path)?).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn simulate(config: &Path, seed: Option<u64>, out: &Path) -> Result<(), Failure> {
    let mut config = SimConfig::load(config)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let trace = sim::run_simulation(&config)?;
    ensure_dir(out)?;
    let trace_path = out.join("trace.csv");
    metrics::export_csv(&trace, create(&trace_path)?)
        .map_err(|e| Failure::Io(format!("{}: {e}", trace_path.display())))?;
    let summary = RunSummary::of(&trace);
    write_json(&summary, &out.join("summary.json"))?;
    println!(
        "{} transactions ({} priority) under {}; outputs in {}",
        summary.records,
        summary.priority.issued,
        config.strategy,
        out.display()
    );
    Ok(())
}

fn compare(config: &Path, seeds: u64, out: &Path) -> Result<(), Failure> {
    if seeds == 0 {
        return Err(Failure::Config("invalid `--seeds`: must be at least 1".into()));
    }
    let config = SimConfig::load(config)?;
    ensure_dir(out)?;
    let base = config.seed;
    let reports: Vec<ComparisonReport> = (0..seeds)
        .into_par_iter()
        .map(|i| -> Result<ComparisonReport, Failure> {
            let seeded = config.with_seed(base.wrapping_add(i));
            let (uniform, ptsa) = sim::paired_runs(&seeded)?;
            let report = metrics::compare(&uniform, &ptsa)?;
            write_json(&report, &out.join(format!("report_seed_{}.json", seeded.seed)))?;
            Ok(report)
        })
        .collect::<Result<_, _>>()?;
    let aggregate = Aggregate::of(base, &reports);
    write_json(&aggregate, &out.join("aggregate.json"))?;
    let reduction = aggregate.mean_latency_reduction.map_or("n/a".to_owned(), |r| format!("{:.1}%", 100.0 * r));
    println!(
        "ptsa faster in {}/{} seeds; mean priority latency reduction {reduction}",
        aggregate.ptsa_wins, aggregate.seeds
    );
    Ok(())
}

fn gen_config(out: &Path) -> Result<(), Failure> {
    fs::write(out, REFERENCE_CONFIG_TOML).map_err(io_failure(out))
}

fn self_check(inject_fault: bool) -> ExitCode {
    let fault = if inject_fault { Fault::BumpGenesisWeight } else { Fault::None };
    let mut ok = true;

    match oracle::weight_self_check(SELF_CHECK_SEED, SELF_CHECK_TRIALS, SELF_CHECK_MAX_SIZE, fault) {
        Ok(n) => println!("PASS cumulative weight matches brute force on {n} random DAGs"),
        Err(cex) => {
            ok = false;
            println!(
                "FAIL cumulative weight on DAG #{}: transaction {} has {} maintained, {} by brute force",
                cex.trial, cex.mismatch.id, cex.mismatch.maintained, cex.mismatch.brute_force
            );
            print!("minimal failing DAG:\n{}", EdgeList(&cex.dag));
        }
    }

    for case in oracle::branch_table(0..16) {
        match &case.problem {
            None => println!("PASS branch table p={} common={} -> {:?}", case.priority, case.common, case.observed),
            Some(problem) => {
                ok = false;
                println!("FAIL branch table p={} common={}: {problem}", case.priority, case.common);
            }
        }
    }

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ORACLE)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate { config, seed, out } => simulate(&config, seed, &out),
        Command::Compare { config, seeds, out } => compare(&config, seeds, &out),
        Command::GenConfig { out } => gen_config(&out),
        Command::SelfCheck { inject_fault } => return self_check(inject_fault),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
