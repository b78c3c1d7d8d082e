//! Alternating hemisphere solves with the index sets recomputed every sweep.

use std::time::Instant;

use num_complex::Complex64;

use crate::diagnostics::{
    angle_distortion, Algorithm, Conventions, Energy, Parameterization, RunReport, REPORT_SCHEMA_VERSION,
};
use crate::error::Result;
use crate::initial::initial_spherical_map;
use crate::laplacian::{assemble_cotangent_laplacian, dirichlet_energy, extract_subsystem, LaplacianSystem};
use crate::mesh::{validate_genus_zero, Mesh};
use crate::partition::{partition_indices, IndexPartition};
use crate::plane::{inverse_stereo, invert_plane, stereo_project};
use crate::sparse::SparseCholesky;

pub const DEFAULT_RHO: f64 = 1.1;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 1000;

#[derive(Debug, Clone)]
pub struct DemOptions {
    pub rho: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DemOptions {
    fn default() -> Self {
        Self { rho: DEFAULT_RHO, tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub h: Vec<Complex64>,
    pub partition: IndexPartition,
    /// `max_i |(L_s h_I + B_s h_B)_i|` after the solve.
    pub residual: f64,
}

/// Inverts `h`, partitions by `|h| < rho`, and replaces the interior values
/// with the harmonic extension of the boundary values.
pub fn dem_sweep(system: &LaplacianSystem, mesh: &Mesh, h: &[Complex64], rho: f64) -> Result<Sweep> {
    let mut h = invert_plane(h)?;
    let partition = partition_indices(mesh, &h, rho)?;
    let (l, b) = extract_subsystem(system, &partition.interior, &partition.boundary)?;
    let hb: Vec<Complex64> = partition.boundary.iter().map(|&v| h[v]).collect();
    let rhs: Vec<Complex64> = b.mul_complex(&hb).into_iter().map(|z| -z).collect();
    let x = SparseCholesky::factor(&l)?.solve_complex(&rhs)?;
    let lx = l.mul_complex(&x);
    let residual = lx.iter().zip(&rhs).map(|(a, r)| (a - r).norm()).fold(0.0, f64::max);
    for (&v, z) in partition.interior.iter().zip(x) {
        h[v] = z;
    }
    Ok(Sweep { h, partition, residual })
}

pub fn run_dem(mesh: &Mesh, options: &DemOptions) -> Result<Parameterization> {
    let started = Instant::now();
    validate_genus_zero(mesh).into_result()?;
    let system = assemble_cotangent_laplacian(mesh)?;
    let initial = initial_spherical_map(mesh, &system)?;
    let mut h = stereo_project(&initial.f)?;
    let mut f = initial.f.clone();
    let mut previous = initial.quality;
    let mut energies = Vec::new();
    let mut sizes = (0, 0);
    let mut converged = false;

    for _ in 0..options.max_iter {
        let south = dem_sweep(&system, mesh, &h, options.rho)?;
        let north = dem_sweep(&system, mesh, &south.h, options.rho)?;
        sizes = (south.partition.n_boundary(), north.partition.n_boundary());
        h = north.h;
        f = inverse_stereo(&h)?;
        let e = dirichlet_energy(&system, &f)?;
        energies.push(Energy::new(e));
        if (e - previous).abs() < options.tol * e.max(1.0) {
            converged = true;
            break;
        }
        previous = e;
    }
    if !converged {
        log::warn!("dem: not converged after {} iterations", energies.len());
    }

    let energy = Energy::new(dirichlet_energy(&system, &f)?);
    let distortion = angle_distortion(mesh, &f)?;
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        algorithm: Algorithm::Dem,
        n: mesh.n_vertices(),
        m1: sizes.0,
        m2: sizes.1,
        rho: options.rho,
        tol: options.tol,
        max_iter: options.max_iter,
        iterations: energies.len(),
        converged,
        energy,
        energies,
        residuals_h1: Vec::new(),
        residuals_h2: Vec::new(),
        scalings: Vec::new(),
        certificate: None,
        distortion,
        r_linear: None,
        initial,
        conventions: Conventions::default(),
        wall_time: Some(started.elapsed().as_secs_f64()),
    };
    Ok(Parameterization { f, report })
}
