//! Command-line front end: parameterize a mesh, check the convergence
//! certificate, compare the two solvers, or process a directory.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod batch;
mod certify;
mod compare;
mod io;
mod param;

/// Exit status for a run that finished but did not converge, or a
/// certificate that does not hold.
const EXIT_UNMET: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "sphereconf", version, about = "Spherical conformal parameterization of genus-zero meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Map a mesh to the unit sphere.
    Param(param::ParamArgs),
    /// Estimate eta from a short MDEM burn-in and evaluate the certificate.
    Certify(certify::CertifyArgs),
    /// Run DEM and MDEM on the same mesh and tabulate the results.
    Compare(compare::CompareArgs),
    /// Run MDEM with certification on every mesh in a directory.
    Batch(batch::BatchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Dem,
    Mdem,
}

impl Algo {
    pub fn default_rho(self) -> f64 {
        match self {
            Algo::Dem => sphereconf::dem::DEFAULT_RHO,
            Algo::Mdem => sphereconf::mdem::DEFAULT_RHO,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AreaNormalization {
    /// Scale the input to unit total area.
    One,
    /// Scale the input to the area of the unit sphere.
    #[value(name = "4pi")]
    FourPi,
    None,
}

impl AreaNormalization {
    pub fn target(self) -> Option<f64> {
        match self {
            AreaNormalization::One => Some(1.0),
            AreaNormalization::FourPi => Some(4.0 * std::f64::consts::PI),
            AreaNormalization::None => None,
        }
    }
}

/// Solver settings shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Partition radius; defaults to 1.4 for MDEM and 1.1 for DEM.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = sphereconf::mdem::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = sphereconf::mdem::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Rescale the input mesh before solving.
    #[arg(long, value_enum, default_value_t = AreaNormalization::None)]
    pub area: AreaNormalization,
}

impl SolverArgs {
    pub fn rho_for(&self, algo: Algo) -> anyhow::Result<f64> {
        let rho = self.rho.unwrap_or(algo.default_rho());
        anyhow::ensure!(rho > 1.0 && rho.is_finite(), "cli: --rho must exceed 1 (got {rho})");
        Ok(rho)
    }

    pub fn check(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.tol > 0.0 && self.tol.is_finite(), "cli: --tol must be positive (got {})", self.tol);
        Ok(())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SPHERECONF_LOG", "warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Param(args) => param::run(&args),
        Command::Certify(args) => certify::run(&args),
        Command::Compare(args) => compare::run(&args),
        Command::Batch(args) => batch::run(&args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_UNMET),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
