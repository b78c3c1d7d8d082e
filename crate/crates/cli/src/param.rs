use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use sphereconf::dem::{run_dem, DemOptions};
use sphereconf::laplacian::assemble_cotangent_laplacian;
use sphereconf::mdem::{run_mdem, MdemOptions};

use crate::io::{default_output, load_mesh, write_history, write_output_mesh, write_report};
use crate::{Algo, SolverArgs};

#[derive(Args, Debug)]
pub struct ParamArgs {
    /// Input mesh (.off or .obj).
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Mdem)]
    pub algo: Algo,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Spherical mesh, written in the input's format. Defaults to
    /// `<input stem>.sphere.<ext>` next to the input.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON run report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Per-iteration CSV. For MDEM this also turns on per-step energies.
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Write the cotangent Laplacian in MatrixMarket format.
    #[arg(long)]
    pub dump_laplacian: Option<PathBuf>,
    /// Include wall time in the report (makes it non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

/// Returns whether the solver converged.
pub fn run(args: &ParamArgs) -> anyhow::Result<bool> {
    args.solver.check()?;
    let rho = args.solver.rho_for(args.algo)?;
    let (mesh, format) = load_mesh(&args.input, args.solver.area)?;

    if let Some(path) = &args.dump_laplacian {
        let system = assemble_cotangent_laplacian(&mesh)?;
        let file = std::fs::File::create(path).with_context(|| format!("io: cannot create {}", path.display()))?;
        system.matrix().write_matrix_market(std::io::BufWriter::new(file))?;
    }

    let mut out = match args.algo {
        Algo::Dem => run_dem(&mesh, &DemOptions { rho, tol: args.solver.tol, max_iter: args.solver.max_iter })?,
        Algo::Mdem => run_mdem(
            &mesh,
            &MdemOptions {
                rho,
                tol: args.solver.tol,
                max_iter: args.solver.max_iter,
                certify: true,
                track_energy: args.history.is_some(),
            },
        )?,
    };
    if !args.timing {
        out.report.wall_time = None;
    }

    let target = args.out.clone().unwrap_or_else(|| default_output(&args.input, format));
    write_output_mesh(&target, &mesh.with_vertices(out.f.clone()), format)?;
    if let Some(path) = &args.report {
        write_report(path, &out.report)?;
    }
    if let Some(path) = &args.history {
        write_history(path, &out.report)?;
    }

    let r = &out.report;
    println!(
        "{}: n = {}, iterations = {}, converged = {}, E_D = {:.10}, mean d_theta = {:.6}",
        format!("{:?}", r.algorithm).to_lowercase(),
        r.n,
        r.iterations,
        r.converged,
        r.energy.raw,
        r.distortion.mean
    );
    if let Some(c) = &r.certificate {
        println!("certificate: eta = {:.6}, rho = {:.6}, {}", c.eta, c.spectral_radius, verdict(c.satisfied));
    }
    Ok(r.converged)
}

pub fn verdict(satisfied: bool) -> &'static str {
    if satisfied {
        "SATISFIED"
    } else {
        "VIOLATED"
    }
}
