//! `slicegeom`: batch computations on finite-dimensional normed spaces.
//!
//! Exit status: 0 on success, 2 when inputs fail validation, 3 when a check
//! detects an invariant violation, 1 for anything else.

mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grid::{Ints, Reals};
use output::Report;
use slicegeom_core::{Error, SolverBudget};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Invariant(String),
    Other(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvariantViolation(_) => CliError::Invariant(e.to_string()),
            Error::Lp(_) => CliError::Other(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "slicegeom", version, about = "Slice diameters and midpoint hulls of normed spaces")]
struct Cli {
    /// Directory for CSV reports and JSON sidecars.
    #[arg(long, global = true, env = "SLICEGEOM_OUT", default_value = "slicegeom-out")]
    out: PathBuf,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random sphere samples beyond the ball vertices.
    #[arg(long, global = true, default_value_t = 64)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 8)]
    starts: usize,
    #[arg(long, global = true, default_value_t = 400)]
    iterations: usize,
    #[arg(long, global = true, default_value_t = 720)]
    resolution: usize,
    /// Smallest gap reported as a separation.
    #[arg(long, global = true, default_value_t = 1e-4)]
    margin: f64,
}

impl BudgetArgs {
    fn budget(&self) -> SolverBudget {
        SolverBudget {
            seed: self.seed,
            samples: self.samples,
            starts: self.starts,
            iterations: self.iterations,
            resolution: self.resolution,
            margin: self.margin,
            ..SolverBudget::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Space files: validation and summary.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Slice diameters and witnesses.
    #[command(subcommand)]
    Slice(SliceCmd),
    /// C_n^alpha on an alpha x n grid.
    CnAlpha {
        #[arg(long)]
        space: PathBuf,
        /// Comma list of levels.
        #[arg(long, value_parser = grid::reals)]
        alpha: Reals,
        /// Range `a..b` or comma list.
        #[arg(long, value_parser = grid::ints, default_value = "1..4")]
        n: Ints,
    },
    /// Cleaned decay profile for n = 1..=nmax.
    Decay {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = grid::reals)]
        alpha: Reals,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Uniform-criterion verdict read at n = dim + 1.
    Verdict {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = grid::reals, default_value = "1,2")]
        alpha: Reals,
        #[arg(long, default_value_t = slicegeom_core::criterion::DEFAULT_THETA)]
        theta: f64,
    },
    /// Surrogate test over a family of spaces, one --space per index.
    Sequence {
        #[arg(long, required = true)]
        space: Vec<PathBuf>,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_parser = grid::reals)]
        delta: Reals,
        #[arg(long, value_enum, default_value = "frechet")]
        surrogate: SurrogateArg,
        #[arg(long, default_value_t = slicegeom_core::criterion::DEFAULT_DENSITY_CUT)]
        cut: f64,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
    /// Step-function sandbox.
    #[command(subcommand)]
    Sandbox(SandboxCmd),
    /// Post-processing of earlier reports.
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Clone, Copy, clap::ValueEnum)]
pub enum SurrogateArg {
    Frechet,
    Density,
}

#[derive(Subcommand)]
enum SpaceCmd {
    Validate { files: Vec<PathBuf> },
    Info { file: PathBuf },
}

#[derive(Subcommand)]
enum SliceCmd {
    Diam {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = grid::reals, allow_hyphen_values = true)]
        functional: Reals,
        #[arg(long, value_parser = grid::reals)]
        depth: Reals,
    },
    MinDiam {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = grid::reals)]
        depth: Reals,
    },
    WitnessSpread {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = grid::reals, allow_hyphen_values = true)]
        functional: Reals,
        #[arg(long)]
        depth: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
    },
    WitnessSeparate {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = grid::reals, allow_hyphen_values = true)]
        point: Reals,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
    },
}

#[derive(Subcommand)]
enum SandboxCmd {
    /// d_m(f, g) for step functions in JSON files (g defaults to 0).
    Dm {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: Option<PathBuf>,
    },
    /// Subadditivity, scaling and triangle checks on seeded random functions.
    Calculus {
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
    /// Averages of independent spikes against the constant one.
    Spikes {
        #[arg(long, value_parser = grid::reals, default_value = "0.5,0.25,0.125")]
        s: Reals,
        #[arg(long, value_parser = grid::ints, default_value = "1..8")]
        n: Ints,
    },
    /// Empirical delta of the near-disjointness inequality.
    NearDisjoint {
        /// JSON files, each one step function or a list of them.
        #[arg(long)]
        family: Vec<PathBuf>,
        /// Add the constant function 1 to the family.
        #[arg(long)]
        one: bool,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 8)]
        probes: usize,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Long-format decay curves from a `decay` sidecar.
    PlotData {
        #[arg(long)]
        profile: PathBuf,
    },
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let budget = cli.budget.budget();
    match commands::run(cli.command, &budget).and_then(|r| r.emit(&cli.out, &args[1..], &budget).map(|_| r)) {
        Ok(Report { failure: None, .. }) => ExitCode::SUCCESS,
        Ok(Report { failure: Some(e), .. }) | Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
