//! `aeset` command-line front end.
//!
//! Every subcommand computes a list of outputs (stdout text, files, CSV
//! rows to append) before anything is written, so a run can be replayed
//! from its manifest and compared digest by digest.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::commands::{Failure, Output};

#[derive(Parser, Debug)]
#[command(name = "aeset", version, about = "Absolutely entangled sets of pure states")]
struct Cli {
    /// Write the run manifest to this path. Without it a manifest is
    /// written next to the first output file, if there is one.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Run the four-state criterion (and optionally the optimizer) on a set.
    Check(CheckArgs),
    /// Write one of the explicit families as state-set JSON.
    Construct(ConstructArgs),
    /// Overlap thresholds for every factorization of d, as CSV.
    AminTable(AminArgs),
    /// Monte-Carlo estimate of the fraction of absolutely entangled sets.
    Volume(VolumeArgs),
    /// Minimize the total entanglement entropy over global unitaries.
    Minimize(MinimizeArgs),
    /// Unitary making a small set fully product.
    Disentangle(DisentangleArgs),
    /// Smallest family parameter at which the criterion certifies subsets.
    CriticalA(CriticalArgs),
    /// Re-run the command recorded in a manifest and compare digests.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct OutArg {
    /// Write the main result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct OptArgs {
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-11)]
    product_threshold: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct CheckArgs {
    #[arg(long)]
    states: PathBuf,
    /// Defaults to 2x2 for four-dimensional states.
    #[arg(long)]
    partition: Option<String>,
    /// Rescale amplitudes to unit norm instead of rejecting them.
    #[arg(long)]
    normalize: bool,
    /// Also classify with the entropy minimizer.
    #[arg(long)]
    optimize: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    opt: OptArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ConstructArgs {
    #[command(subcommand)]
    family: Family,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
enum Family {
    /// `φ_1 = ξ_1`, `φ_i = a ξ_1 + sqrt(1 - a²) ξ_i`, sized for the partition.
    Theorem4 {
        #[arg(long)]
        partition: String,
        #[arg(long)]
        a: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sphere-point family in C^4.
    Theorem2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Minimum |det| for four points.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Five two-qubit states with a symmetric fifth state.
    N5 {
        #[arg(long)]
        b: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// The `d1 + d2` overlap family for a bipartition.
    Eq1 {
        #[arg(long, default_value_t = 2)]
        d1: usize,
        #[arg(long, default_value_t = 2)]
        d2: usize,
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Haar-random states.
    Haar {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
struct AminArgs {
    #[arg(long)]
    d: usize,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum VolumeMethod {
    /// Criterion only (2x2, N = 4).
    Lower,
    /// Criterion, then the optimizer.
    Full,
}

#[derive(Args, Debug, Clone, Serialize)]
struct VolumeArgs {
    #[arg(long)]
    partition: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = VolumeMethod::Full)]
    method: VolumeMethod,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Append the estimate as a CSV row to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    opt: OptArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Clone, Serialize)]
struct MinimizeArgs {
    #[arg(long)]
    states: PathBuf,
    #[arg(long)]
    partition: String,
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the best unitary as unitary JSON.
    #[arg(long)]
    unitary_out: Option<PathBuf>,
    #[command(flatten)]
    opt: OptArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Clone, Serialize)]
struct DisentangleArgs {
    #[arg(long)]
    states: PathBuf,
    #[arg(long)]
    partition: String,
    #[arg(long)]
    normalize: bool,
    /// Also write the unitary as unitary JSON.
    #[arg(long)]
    unitary_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum CriticalFamily {
    Eq1,
    N5,
    Theorem2,
}

#[derive(Args, Debug, Clone, Serialize)]
struct CriticalArgs {
    #[arg(long, value_enum)]
    family: CriticalFamily,
    #[arg(long, default_value_t = 2)]
    d1: usize,
    #[arg(long, default_value_t = 2)]
    d2: usize,
    /// Number of sphere points (theorem2).
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// `all`, or four-element index lists separated by `;`, e.g. `0,1,2,3;0,1,2,4`.
    #[arg(long, default_value = "all")]
    subsets: String,
    #[arg(long, default_value_t = 1e-3)]
    resolution: f64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ReplayArgs {
    /// Manifest written by an earlier run.
    path: PathBuf,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli, argv: Vec<String>) -> Result<(), Failure> {
    if let Command::Replay(r) = &cli.command {
        return manifest::replay(&r.path);
    }
    let started = chrono::Utc::now();
    let mut command = cli.command;
    let mut argv = argv;
    if let Some(seed) = commands::fill_seed(&mut command) {
        eprintln!("seed: {seed}");
        argv.push("--seed".into());
        argv.push(seed.to_string());
    }
    let outputs = commands::execute(&command)?;
    commands::write_outputs(&outputs)?;
    let target = cli
        .manifest
        .or_else(|| outputs.iter().find_map(Output::file).map(manifest::default_path));
    if let Some(path) = target {
        manifest::write(&path, &argv, &command, started, &outputs)?;
    }
    Ok(())
}
