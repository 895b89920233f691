//! `tdem`: density-equalizing maps on tori and toroidal parameterization.
//!
//! Exit codes: 0 success, 1 I/O or numerical failure, 2 invalid input,
//! 3 non-convergence under `--strict`.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ConfigFile;

#[derive(Parser)]
#[command(
    name = "tdem",
    version,
    about = "Density-equalizing maps on toroidal surfaces"
)]
struct Cli {
    /// `key = value` file with defaults for the command's flags.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a grid torus mesh with a (u, v) sidecar.
    MakeTorus(MakeTorusArgs),
    /// Run the density-equalizing map on a mesh lying on a torus.
    Tdem(TdemArgs),
    /// Map a genus-one mesh onto a torus, optionally area preserving.
    Parameterize(ParameterizeArgs),
    /// Area distortion, density variance and seam checks of a mapped mesh.
    Metrics(MetricsArgs),
}

#[derive(Args)]
pub struct MakeTorusArgs {
    /// Major radius R (default 3).
    #[arg(long)]
    major: Option<f64>,
    /// Minor radius r (default 1).
    #[arg(long)]
    minor: Option<f64>,
    /// Grid cells around the ring (default 102).
    #[arg(long)]
    nu: Option<usize>,
    /// Grid cells around the tube (default 34).
    #[arg(long)]
    nv: Option<usize>,
    /// Output mesh, `.obj` or `.ply`.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Iteration controls shared by `tdem` and `parameterize`.
#[derive(Args)]
pub struct IterationArgs {
    /// Time step (default 0.1).
    #[arg(long)]
    dt: Option<f64>,
    /// Density-error threshold (default 1e-3).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Iteration cap (default 1000).
    #[arg(long)]
    nmax: Option<usize>,
    /// Skip the fold repair step.
    #[arg(long)]
    no_overlap_correction: bool,
    /// Exit with code 3 if the threshold is not reached.
    #[arg(long)]
    strict: bool,
    /// Base vertex of the computed cut graph (default 0).
    #[arg(long)]
    cut_base: Option<usize>,
}

#[derive(Args)]
pub struct TdemArgs {
    /// Input mesh lying on a torus, `.obj` or `.ply`.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Torus radii; read from the mesh's `.uv.csv` sidecar or fitted when omitted.
    #[arg(long)]
    major: Option<f64>,
    #[arg(long)]
    minor: Option<f64>,
    /// uniform | constant:C | cos_u | sinusoid | ball:u0,v0,radius,inside,outside | csv:PATH
    #[arg(long)]
    population: Option<String>,
    #[command(flatten)]
    iteration: IterationArgs,
    /// Outputs are written to `<prefix>.mapped.obj`, `<prefix>.planar.obj`,
    /// `<prefix>.report.csv` and `<prefix>.density.csv`.
    #[arg(long)]
    out_prefix: Option<PathBuf>,
}

#[derive(Args)]
pub struct ParameterizeArgs {
    /// Genus-one input mesh, `.obj` or `.ply`.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Target major radius (default 2).
    #[arg(long)]
    major: Option<f64>,
    /// Target minor radius (default 1).
    #[arg(long)]
    minor: Option<f64>,
    /// area | uniform | csv:PATH (default area).
    #[arg(long)]
    population: Option<String>,
    /// Harmonic weights of the initial map: uniform | cotangent (default uniform).
    #[arg(long)]
    weights: Option<String>,
    #[command(flatten)]
    iteration: IterationArgs,
    /// Outputs are written to `<prefix>.obj`, `<prefix>.initial.obj`,
    /// `<prefix>.darea.csv`, `<prefix>.histogram.csv` and `<prefix>.report.csv`.
    #[arg(long)]
    out_prefix: Option<PathBuf>,
}

#[derive(Args)]
pub struct MetricsArgs {
    /// Mesh before mapping.
    #[arg(long)]
    source: Option<PathBuf>,
    /// Mapped mesh with the same connectivity.
    #[arg(long)]
    mapped: Option<PathBuf>,
    /// Radii of the torus carrying the mapped mesh; fitted when omitted.
    #[arg(long)]
    major: Option<f64>,
    #[arg(long)]
    minor: Option<f64>,
    /// Population for the density variance: area, or any `tdem` population
    /// evaluated on the source mesh (which must then lie on the torus).
    #[arg(long)]
    population: Option<String>,
    /// Writes `<prefix>.darea.csv` and `<prefix>.histogram.csv`.
    #[arg(long)]
    out_prefix: Option<PathBuf>,
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<tdem_core::Error> for Failure {
    fn from(e: tdem_core::Error) -> Self {
        use tdem_core::Error::*;
        let code = match e {
            Io { .. } | Solver(_) | Folded(_) => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    };
    let result = config.and_then(|cfg| match cli.command {
        Command::MakeTorus(a) => commands::make_torus(a, &cfg),
        Command::Tdem(a) => commands::tdem(a, &cfg),
        Command::Parameterize(a) => commands::parameterize(a, &cfg),
        Command::Metrics(a) => commands::metrics(a, &cfg),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
