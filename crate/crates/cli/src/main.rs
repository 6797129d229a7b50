//! `iet`: exact interval exchange computations from the command line.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "iet",
    version,
    about = "Exact interval exchange transformations"
)]
pub struct Cli {
    /// IET config file (TOML or JSON): `lengths = ["3/5", "2/5"]`, `perm = [2, 1]`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for `scan` and `wm`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Cap on induction steps and other unbounded loops.
    #[arg(long, global = true, default_value_t = iet_core::induction::DEFAULT_STEP_CAP)]
    step_cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate f (or f^-1) at a point.
    Eval {
        #[arg(long)]
        x: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Orbit window f^k(x) for k = -n..n-1 (or -n..n with --symmetric).
    Orbit {
        #[arg(long)]
        x: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        symmetric: bool,
    },
    /// First-return map to [0, t).
    Induce {
        #[arg(long)]
        t: String,
    },
    /// Record series of n * rho'_n(t) (or n * rho_n(t) with --phi).
    Psi {
        #[arg(long)]
        t: String,
        #[arg(long = "N")]
        horizon: u64,
        #[arg(long)]
        phi: bool,
    },
    /// Classify grid points as D'-hits, psi-positive evidence, or undecided.
    Scan {
        /// `lo:hi:count`, equispaced exact rationals including both ends.
        #[arg(long)]
        grid: String,
        #[arg(long = "N")]
        horizon: u64,
        /// Evidence threshold; defaults to b/(24r).
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Weyl-sum eigenvalue scan for the induced map on [0, t).
    Wm {
        #[arg(long)]
        t: String,
        #[arg(long = "N")]
        horizon: u64,
        #[arg(long, default_value_t = 1024)]
        grid_size: usize,
        /// Base point; defaults to t/2 moved off D'.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        peak_threshold: f64,
    },
    /// Distinct stack of height >= N and measure >= b/r.
    Stack {
        #[arg(long = "N")]
        height: u64,
        /// Replace the stack by its trimmed middle-third stack.
        #[arg(long)]
        trim: bool,
        /// Also write the stack as JSON lines to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Probe the discontinuity orbits for collisions.
    Idoc {
        #[arg(long, default_value_t = 10_000)]
        depth: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
