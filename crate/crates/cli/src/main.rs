//! `o3sim`: design reports, parameter scans and exact-diagonalization runs
//! for the sphere-chain simulator of the O(3) sigma model.
//!
//! Exit codes: 0 ok, 1 output failure, 2 invalid input, 3 infeasible design,
//! 4 non-convergence or rejected time step, 5 dimension cap exceeded.

mod config;
mod design;
mod output;
mod sim;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use o3sim::dynamics::RampShape;
use o3sim::lattice::Boundary;
use o3sim::spectra::SolverMethod;

use crate::output::Format;

/// Overrides the Hilbert-space dimension cap of every `sim` command.
pub const MAX_DIM_ENV: &str = "O3SIM_MAX_DIM";

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Infeasible(String),
    Core(o3sim::Error),
    Output(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        use o3sim::Error as E;
        match self {
            Failure::Invalid(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Output(_) => 1,
            Failure::Core(e) => match e {
                E::Domain { .. } | E::UnsupportedAxis | E::Json(_) => 2,
                E::NonConvergence { .. } | E::StepRejected { .. } | E::DegenerateGap { .. } => 4,
                E::DimensionCap { .. } => 5,
                E::Io(_) | E::Csv(_) => 1,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid input: {m}"),
            Failure::Infeasible(m) => write!(f, "infeasible design: {m}"),
            Failure::Output(m) => write!(f, "cannot write output: {m}"),
            Failure::Core(e) => e.fmt(f),
        }
    }
}

impl From<o3sim::Error> for Failure {
    fn from(e: o3sim::Error) -> Self {
        Failure::Core(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "o3sim", version, about = "Quantum simulator design and rotor-chain exact diagonalization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Device-level calculations.
    #[command(subcommand)]
    Design(DesignCommand),
    /// Lattice simulations of the rotor chain.
    #[command(subcommand)]
    Sim(SimCommand),
}

#[derive(Subcommand, Debug)]
enum DesignCommand {
    /// Feasibility report for one geometry.
    Report(ReportArgs),
    /// Sweep one parameter and tabulate the effective parameters.
    Scan(ScanArgs),
}

#[derive(Subcommand, Debug)]
enum SimCommand {
    /// Lowest levels across all charge sectors.
    Spectrum(SimArgs),
    /// Mass gap and degeneracy of the first excited level.
    Gap(SimArgs),
    /// Ground-state charge over a chemical-potential grid.
    ChargeScan(SimArgs),
    /// Ground-state direction correlations from the chain center.
    Correlation(SimArgs),
    /// Time evolution through a coupling ramp.
    Ramp(SimArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Directory for output files; created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GeometryFlags {
    #[arg(long)]
    pub delta_m: Option<f64>,
    #[arg(long)]
    pub rho_m: Option<f64>,
    #[arg(long)]
    pub alpha_m: Option<f64>,
    #[arg(long)]
    pub gamma_m: Option<f64>,
    #[arg(long)]
    pub dx_m: Option<f64>,
    #[arg(long = "temperature-k")]
    pub temperature_k: Option<f64>,
    #[arg(long = "magnetic-field-t")]
    pub magnetic_field_t: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// JSON geometry/environment document.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub geometry: GeometryFlags,
    /// Treat warnings as infeasible.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub geometry: GeometryFlags,
    /// delta, rho, alpha, gamma, dx, temperature or magnetic_field.
    #[arg(long)]
    pub parameter: Option<String>,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub end: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SimArgs {
    /// JSON simulation document.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Derive kappa and mu_tilde from a geometry document.
    #[arg(long)]
    pub from_geometry: Option<PathBuf>,
    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long)]
    pub lmax: Option<u32>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Dimensionless chemical potential μ/E₀.
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, value_parser = parse_boundary)]
    pub boundary: Option<Boundary>,
    #[arg(long, value_parser = config::parse_method)]
    pub method: Option<SolverMethod>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Number of levels for `spectrum`.
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub mu_start: Option<f64>,
    #[arg(long)]
    pub mu_end: Option<f64>,
    #[arg(long)]
    pub mu_steps: Option<usize>,
    #[arg(long)]
    pub kappa_start: Option<f64>,
    #[arg(long)]
    pub kappa_end: Option<f64>,
    /// Ramp duration in units of ħ/E₀.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long, value_parser = parse_shape)]
    pub shape: Option<RampShape>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub record_points: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_boundary(s: &str) -> Result<Boundary, String> {
    s.parse().map_err(|e: o3sim::Error| e.to_string())
}

fn parse_shape(s: &str) -> Result<RampShape, String> {
    s.parse().map_err(|e: o3sim::Error| e.to_string())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Design(DesignCommand::Report(args)) => design::report(&args),
        Command::Design(DesignCommand::Scan(args)) => design::scan(&args),
        Command::Sim(cmd) => {
            let (kind, args) = match &cmd {
                SimCommand::Spectrum(a) => (sim::Kind::Spectrum, a),
                SimCommand::Gap(a) => (sim::Kind::Gap, a),
                SimCommand::ChargeScan(a) => (sim::Kind::ChargeScan, a),
                SimCommand::Correlation(a) => (sim::Kind::Correlation, a),
                SimCommand::Ramp(a) => (sim::Kind::Ramp, a),
            };
            sim::run(kind, args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
