use std::path::PathBuf;

use clap::Args;
use sphereconf::diagnostics::{convergence_certificate, track_eta};
use sphereconf::mdem::{mdem_step, prepare, MdemState};

use crate::io::load_mesh;
use crate::param::verdict;
use crate::{Algo, SolverArgs};

pub const DEFAULT_BURN_IN: usize = 20;

#[derive(Args, Debug)]
pub struct CertifyArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// MDEM steps used to estimate eta.
    #[arg(long, default_value_t = DEFAULT_BURN_IN, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub burn_in: usize,
}

/// Returns whether the certificate holds.
pub fn run(args: &CertifyArgs) -> anyhow::Result<bool> {
    args.solver.check()?;
    let rho = args.solver.rho_for(Algo::Mdem)?;
    let (mesh, _) = load_mesh(&args.input, args.solver.area)?;
    let setup = prepare(&mesh, rho)?;
    let mut state = MdemState::new(&setup.ops)?;
    for _ in 0..args.burn_in {
        mdem_step(&mut state, &setup.ops, &setup.deflation)?;
        if state.converged(args.solver.tol) {
            break;
        }
    }
    let eta = track_eta(&state.scaled_minima)?;
    let cert = convergence_certificate(&setup.deflation, &setup.ops, eta)?;
    println!(
        "n = {}, m1 = {}, m2 = {}, burn-in steps = {}",
        mesh.n_vertices(),
        setup.ops.m1(),
        setup.ops.m2(),
        state.step
    );
    println!("eta = {:.6}", cert.eta);
    println!("gamma = {:.6}", cert.gamma);
    println!("rho(gamma^2 |A2_hat| A1) = {:.6}", cert.spectral_radius);
    println!("{}", verdict(cert.satisfied));
    Ok(cert.satisfied)
}
