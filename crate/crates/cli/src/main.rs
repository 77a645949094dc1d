//! `lpw`: run the workbench checks, exponent arithmetic, the sequence
//! lemma and the regularity probe from the command line.
//!
//! Exit status: 0 when every checked property holds, 1 when one fails,
//! 2 on bad usage or input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "lpw", version, about = "Littlewood-Paley regularity workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Measure one analytic estimate on concrete data.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Hypotheses, lifted exponents and gains for six inputs.
    Exponents(ExponentArgs),
    /// Check the sequence lemma on a CSV sequence.
    Iterate(IterateArgs),
    /// Manufacture a solution and measure its localized decay.
    Probe(ProbeArgs),
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Spatial dimension.
    #[arg(long = "n")]
    n: Option<usize>,
    /// Points per axis (power of two).
    #[arg(long = "N")]
    points: Option<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Check {
    /// Partition of unity and reconstruction.
    Partition(GridArgs),
    /// Growth of sup/L2 ratios on dyadic shells.
    Bernstein {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2)]
        from: usize,
        #[arg(long, default_value_t = 7)]
        to: usize,
    },
    /// Shell mapping bound `||A P_k f|| <~ 2^{km} ||P_~k f||`.
    Apbound {
        #[command(flatten)]
        grid: GridArgs,
        /// Comma-separated registry names.
        #[arg(long, value_delimiter = ',')]
        symbols: Option<Vec<String>>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Commutators `[P_k, A]` and the remainder symbol of `P_k A`.
    Commutator {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',')]
        symbols: Option<Vec<String>>,
        #[arg(long, default_value_t = 10)]
        from: usize,
        #[arg(long, default_value_t = 14)]
        to: usize,
        /// Points of the one-dimensional remainder-symbol grid.
        #[arg(long = "remainder-N", default_value_t = 256)]
        remainder_points: usize,
    },
    /// Exact zone cover of product shells and the zone estimates.
    Paraproduct {
        #[command(flatten)]
        grid: GridArgs,
        /// Points of the one-dimensional grid used for the zone estimates.
        #[arg(long = "zones-N", default_value_t = 1 << 18)]
        zone_points: usize,
    },
    /// Sobolev mapping property over a grid of `(s, p)`.
    Mapping {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',')]
        symbols: Option<Vec<String>>,
    },
}

#[derive(Args, Debug)]
struct ExponentArgs {
    #[arg(long = "n")]
    n: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    s: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IterateArgs {
    /// CSV file; the last column of each row is the sequence value.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    delta: f64,
    /// First index at which the hypothesis is required.
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// ns | biharmonic | gjms
    #[arg(long)]
    equation: String,
    /// `n,N`, e.g. `2,256`.
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = std::f64::consts::PI / 8.0)]
    rho: f64,
    #[arg(long, default_value_t = 1e-2)]
    amplitude: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Assumed smoothness (defaults per equation).
    #[arg(long)]
    s: Option<f64>,
    /// Assumed integrability (defaults per equation).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-shell `a_k` table.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn configure_threads() -> Result<(), commands::Failure> {
    if let Ok(v) = std::env::var("LPW_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| commands::Failure::usage(format!("LPW_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| commands::Failure::usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| commands::dispatch(cli.command));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
