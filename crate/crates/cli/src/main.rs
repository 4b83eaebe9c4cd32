// `!(a < b)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use newtonflow::Sigma;

/// Exact solvers for the 1D interaction equation with potential `σ|x|`.
#[derive(Debug, Parser)]
#[command(name = "newtonflow", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario file: a measure plus sigma, times, N and seed.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Comma-separated sample times; overrides the scenario.
    #[arg(
        long = "t",
        global = true,
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub times: Option<Vec<f64>>,

    /// Sign of the potential, 1 (attractive) or -1 (repulsive); overrides the scenario.
    #[arg(long, global = true, value_parser = parse_sigma, allow_hyphen_values = true)]
    pub sigma: Option<Sigma>,

    /// Seed for randomized suites; overrides the scenario.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Spatial sample range `A,B`; defaults to the support of the solution, padded.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        num_args = 1,
        allow_hyphen_values = true
    )]
    pub x_range: Option<Vec<f64>>,

    /// Uniform spatial samples; breakpoints of the solution are always added.
    #[arg(long, global = true, default_value_t = 201)]
    pub x_samples: usize,

    /// Uniform samples of the quantile on [0, 1].
    #[arg(long, global = true, default_value_t = 101)]
    pub s_samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cdf, quantile and density profiles at each time, plus particle and
    /// front trajectories for σ = 1.
    Solve,
    /// Closed-form Riemann problem from a single jump `FL -> FR` at `x0`.
    Riemann {
        #[arg(long = "FL", allow_hyphen_values = true)]
        left: f64,
        #[arg(long = "FR", allow_hyphen_values = true)]
        right: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
    },
    /// Compares the gradient flow, the entropy solution and the L² flow.
    Equivalence,
    /// Repulsive particle approximation error on the (N, t) grid.
    Converge,
    /// Randomized contraction checks.
    Contract {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Fréchet velocity field and extended subdifferential plan.
    Subdiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

fn parse_sigma(s: &str) -> Result<Sigma, String> {
    let v: i64 = s
        .trim()
        .parse()
        .map_err(|_| format!("expected 1 or -1, got {s:?}"))?;
    Sigma::from_int(v).map_err(|e| e.to_string())
}

/// Result of a command that ran to completion.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Checks that did not hold; the artifacts are still written.
    pub failures: Vec<String>,
}

fn exit_code(result: &anyhow::Result<Outcome>) -> u8 {
    match result {
        Err(_) => 2,
        Ok(o) if !o.failures.is_empty() => 1,
        Ok(_) => 0,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli);
    match &result {
        Err(e) => eprintln!("error: {e:#}"),
        Ok(o) => {
            for f in &o.failures {
                eprintln!("assertion failed: {f}");
            }
        }
    }
    ExitCode::from(exit_code(&result))
}
