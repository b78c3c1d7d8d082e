use std::path::PathBuf;

use clap::Args;
use sphereconf::dem::{run_dem, DemOptions};
use sphereconf::diagnostics::energy_comparison;
use sphereconf::mdem::{run_mdem, MdemOptions};
use sphereconf::{Mesh, Parameterization};

use crate::io::load_mesh;
use crate::{Algo, SolverArgs};

#[derive(Args, Debug)]
pub struct CompareArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Radius for the DEM run; --rho applies to MDEM only.
    #[arg(long)]
    pub dem_rho: Option<f64>,
    /// Debugging aid: run this algorithm in both slots, so d_E must be 0.
    #[arg(long, value_enum)]
    pub same: Option<Algo>,
}

fn solve(mesh: &Mesh, algo: Algo, rho: f64, args: &CompareArgs) -> anyhow::Result<Parameterization> {
    let (tol, max_iter) = (args.solver.tol, args.solver.max_iter);
    Ok(match algo {
        Algo::Dem => run_dem(mesh, &DemOptions { rho, tol, max_iter })?,
        Algo::Mdem => run_mdem(mesh, &MdemOptions { rho, tol, max_iter, certify: false, track_energy: false })?,
    })
}

pub fn run(args: &CompareArgs) -> anyhow::Result<bool> {
    args.solver.check()?;
    let (mesh, _) = load_mesh(&args.input, args.solver.area)?;
    let [first, second] = match args.same {
        Some(a) => [a, a],
        None => [Algo::Dem, Algo::Mdem],
    };
    let rho_of = |algo: Algo| match algo {
        Algo::Dem => SolverArgs { rho: args.dem_rho, ..args.solver.clone() }.rho_for(algo),
        Algo::Mdem => args.solver.rho_for(algo),
    };
    let runs = [solve(&mesh, first, rho_of(first)?, args)?, solve(&mesh, second, rho_of(second)?, args)?];

    println!(
        "{:<6} {:>16} {:>16} {:>12} {:>12} {:>10} {:>9} {:>10}",
        "algo", "E_D", "E_D-4pi", "mean_dtheta", "sd_dtheta", "iterations", "converged", "wall_s"
    );
    for (algo, run) in [first, second].iter().zip(&runs) {
        let r = &run.report;
        println!(
            "{:<6} {:>16.10} {:>16.10} {:>12.6} {:>12.6} {:>10} {:>9} {:>10.3}",
            format!("{algo:?}").to_lowercase(),
            r.energy.raw,
            r.energy.minus_4pi,
            r.distortion.mean,
            r.distortion.sd,
            r.iterations,
            r.converged,
            r.wall_time.unwrap_or(f64::NAN)
        );
    }
    let d_e = energy_comparison(&runs[0].report, &runs[1].report)?;
    println!("d_E = {d_e:.6e}");
    Ok(true)
}
