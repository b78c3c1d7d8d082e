//! Fixed-partition Dirichlet energy minimization with nonequivalence
//! deflation.
//!
//! After one inversion-and-solve pass per hemisphere the index sets are
//! frozen and the alternating solves collapse to dense transfer operators
//! between the two boundary bands: `A1` maps southern boundary values to the
//! northern boundary (before inversion) and `A2` maps back. The product
//! `A2 A1` is row-stochastic with Perron root 1; subtracting a rank-one term
//! built from its left Perron vector moves that eigenvalue to zero.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dense::{is_irreducible, left_mul, left_perron_vector, mul_complex};
use crate::diagnostics::{
    angle_distortion, convergence_certificate, r_linear_k_star, r_linear_series, track_eta, Algorithm, Conventions,
    Energy, Parameterization, RLinearSeries, RunReport, REPORT_SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::initial::{initial_spherical_map, InitialMap};
use crate::laplacian::{assemble_cotangent_laplacian, dirichlet_energy, extract_subsystem, LaplacianSystem};
use crate::mesh::{validate_genus_zero, Mesh};
use crate::partition::{partition_indices, IndexPartition};
use crate::plane::{inverse_stereo, invert_plane, median_normalize, stereo_project, ZERO_GUARD};
use crate::sparse::{CsrMatrix, SparseCholesky};

pub const DEFAULT_RHO: f64 = 1.4;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 1000;

const PERRON_TOL: f64 = 1e-12;
const PERRON_MAX_ITER: usize = 100_000;
/// Smallest accepted Perron vector entry.
const PERRON_FLOOR: f64 = 1e-14;
/// Most negative transfer-operator entry tolerated before warning.
const SIGN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct MdemOptions {
    pub rho: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Compute the convergence certificate after the run.
    pub certify: bool,
    /// Reconstruct and evaluate the energy after every step.
    pub track_energy: bool,
}

impl Default for MdemOptions {
    fn default() -> Self {
        Self { rho: DEFAULT_RHO, tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER, certify: true, track_energy: false }
    }
}

/// One hemisphere's frozen interior system.
pub struct Hemisphere {
    pub partition: IndexPartition,
    /// `L_s = L[I_s, I_s]`.
    pub interior: CsrMatrix,
    /// `B_s = L[I_s, B_s]`.
    pub coupling: CsrMatrix,
    factor: SparseCholesky,
}

impl Hemisphere {
    fn new(system: &LaplacianSystem, mesh: &Mesh, h: &[Complex64], rho: f64) -> Result<Self> {
        let partition = partition_indices(mesh, h, rho)?;
        let (interior, coupling) = extract_subsystem(system, &partition.interior, &partition.boundary)?;
        let factor = SparseCholesky::factor(&interior)?;
        Ok(Self { partition, interior, coupling, factor })
    }

    /// Solves `L_s x = -B_s b` for interior values given boundary values.
    pub fn solve(&self, boundary_values: &[Complex64]) -> Result<Vec<Complex64>> {
        if boundary_values.len() != self.partition.n_boundary() {
            return Err(Error::DimensionMismatch {
                expected: self.partition.n_boundary(),
                found: boundary_values.len(),
            });
        }
        let rhs: Vec<Complex64> = self.coupling.mul_complex(boundary_values).into_iter().map(|z| -z).collect();
        self.factor.solve_complex(&rhs)
    }

    /// `max_i |(L_s x + B_s b)_i|`.
    pub fn harmonic_residual(&self, interior_values: &[Complex64], boundary_values: &[Complex64]) -> f64 {
        let lx = self.interior.mul_complex(interior_values);
        let bb = self.coupling.mul_complex(boundary_values);
        lx.iter().zip(&bb).map(|(a, b)| (a + b).norm()).fold(0.0, f64::max)
    }

    /// Fills the interior of `h` from its boundary entries.
    pub fn solve_in_place(&self, h: &mut [Complex64]) -> Result<()> {
        let b: Vec<Complex64> = self.partition.boundary.iter().map(|&v| h[v]).collect();
        let x = self.solve(&b)?;
        for (&v, z) in self.partition.interior.iter().zip(x) {
            h[v] = z;
        }
        Ok(())
    }
}

/// Position of every member of `subset` within the sorted list `set`.
fn positions(subset: &[usize], set: &[usize], what: &str) -> Result<Vec<usize>> {
    subset
        .iter()
        .map(|v| {
            set.binary_search(v)
                .map_err(|_| Error::InconsistentPartitions(format!("vertex {v} of {what} is not in the interior")))
        })
        .collect()
}

pub struct TransferOperators {
    /// `-P1 L1^{-1} B1`, `m2 x m1`.
    pub a1: DMatrix<f64>,
    /// `-P2 L2^{-1} B2`, `m1 x m2`.
    pub a2: DMatrix<f64>,
    pub hemispheres: [Hemisphere; 2],
    /// Positions of the northern boundary inside the southern interior.
    pub p1: Vec<usize>,
    /// Positions of the southern boundary inside the northern interior.
    pub p2: Vec<usize>,
    /// Southern-frame vertex values after the first setup solve.
    pub southern_setup: Vec<Complex64>,
    /// Northern-frame vertex values after both setup solves.
    pub northern_setup: Vec<Complex64>,
}

impl TransferOperators {
    pub fn m1(&self) -> usize {
        self.hemispheres[0].partition.n_boundary()
    }

    pub fn m2(&self) -> usize {
        self.hemispheres[1].partition.n_boundary()
    }
}

fn transfer_matrix(hemi: &Hemisphere, rows: &[usize]) -> Result<DMatrix<f64>> {
    let cols = hemi.factor.solve_columns(&hemi.coupling, rows)?;
    Ok(DMatrix::from_fn(rows.len(), cols.len(), |i, j| -cols[j][i]))
}

/// Runs one inversion/partition/solve pass per hemisphere starting from the
/// projected initial map `h`, freezes the index sets, and forms `A1`, `A2`.
pub fn build_transfer_operators(
    system: &LaplacianSystem,
    mesh: &Mesh,
    h: &[Complex64],
    rho: f64,
) -> Result<TransferOperators> {
    let mut h = invert_plane(h)?;
    let south = Hemisphere::new(system, mesh, &h, rho)?;
    south.solve_in_place(&mut h)?;
    let southern_setup = h.clone();

    let mut h = invert_plane(&h)?;
    let north = Hemisphere::new(system, mesh, &h, rho)?;
    north.solve_in_place(&mut h)?;

    let p1 = positions(&north.partition.boundary, &south.partition.interior, "the northern boundary")?;
    let p2 = positions(&south.partition.boundary, &north.partition.interior, "the southern boundary")?;
    let (a1, a2) = rayon::join(|| transfer_matrix(&south, &p1), || transfer_matrix(&north, &p2));
    let (a1, a2) = (a1?, a2?);

    let most_negative = a1.iter().chain(a2.iter()).copied().fold(0.0, f64::min);
    if most_negative < -SIGN_TOLERANCE {
        log::warn!("mdem: transfer operators have negative entries (min {most_negative:e}); mesh is not Delaunay");
    }
    Ok(TransferOperators { a1, a2, hemispheres: [south, north], p1, p2, southern_setup, northern_setup: h })
}

#[derive(Debug, Clone)]
pub struct DeflationData {
    /// `q2^T A2`, length `m2`.
    pub q1: Vec<f64>,
    /// Left Perron vector of `A2 A1` with `q2^T 1 = 1`, length `m1`.
    pub q2: Vec<f64>,
    /// `A2 - 1 q1^T`.
    pub a2_hat: DMatrix<f64>,
    pub perron_iterations: usize,
    pub perron_residual: f64,
}

pub fn deflation_vector(ops: &TransferOperators) -> Result<DeflationData> {
    let product = &ops.a2 * &ops.a1;
    if !is_irreducible(&product) {
        return Err(Error::Reducible);
    }
    let perron = left_perron_vector(&product, PERRON_TOL, PERRON_MAX_ITER)?;
    let q2 = perron.vector;
    if let Some((index, &value)) = q2.iter().enumerate().find(|(_, &v)| !(v > PERRON_FLOOR)) {
        return Err(Error::NonPositivePerron { index, value });
    }
    let q1 = left_mul(&q2, &ops.a2);
    if let Some((index, &value)) = q1.iter().enumerate().find(|(_, &v)| !(v > PERRON_FLOOR)) {
        return Err(Error::NonPositivePerron { index, value });
    }
    let mut a2_hat = ops.a2.clone();
    for (j, &q) in q1.iter().enumerate() {
        for v in a2_hat.column_mut(j).iter_mut() {
            *v -= q;
        }
    }
    Ok(DeflationData { q1, q2, a2_hat, perron_iterations: perron.iterations, perron_residual: perron.residual })
}

#[derive(Debug, Clone)]
pub struct MdemState {
    /// Southern boundary values (southern frame), length `m1`.
    pub h1: Vec<Complex64>,
    /// Northern boundary values (northern frame), length `m2`.
    pub h2: Vec<Complex64>,
    pub step: usize,
    /// `(c_k, c_k+1)` per step.
    pub scalings: Vec<[f64; 2]>,
    pub residuals_h1: Vec<f64>,
    pub residuals_h2: Vec<f64>,
    /// Smallest scaled magnitude of each half-step.
    pub scaled_minima: Vec<[f64; 2]>,
    /// `h1` after every step.
    pub history: Vec<Vec<Complex64>>,
}

impl MdemState {
    /// Starts from the boundary values left by the setup passes.
    pub fn new(ops: &TransferOperators) -> Result<Self> {
        let south = &ops.hemispheres[0].partition.boundary;
        let north = &ops.hemispheres[1].partition.boundary;
        let frame1: Vec<Complex64> = south.iter().map(|&v| ops.northern_setup[v]).collect();
        Ok(Self {
            h1: invert_plane(&frame1)?,
            h2: north.iter().map(|&v| ops.northern_setup[v]).collect(),
            step: 0,
            scalings: Vec::new(),
            residuals_h1: Vec::new(),
            residuals_h2: Vec::new(),
            scaled_minima: Vec::new(),
            history: Vec::new(),
        })
    }

    pub fn converged(&self, tol: f64) -> bool {
        match (self.residuals_h1.last(), self.residuals_h2.last()) {
            (Some(&r1), Some(&r2)) => r1 < tol && r2 < tol,
            _ => false,
        }
    }
}

/// `c * v_i / |v_i|^2` with `c = max_i |v_i|`, and the smallest `|v_i| / c`.
fn scaled_inversion(v: &[Complex64], stage: &'static str) -> Result<(Vec<Complex64>, f64, f64)> {
    let mags: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    if let Some(index) = mags.iter().position(|&m| !(m > ZERO_GUARD)) {
        return Err(Error::ZeroMagnitude { index, stage });
    }
    let c = mags.iter().copied().fold(0.0, f64::max);
    let min = mags.iter().copied().fold(f64::INFINITY, f64::min);
    let out = v.iter().zip(&mags).map(|(z, &m)| z * (c / (m * m))).collect();
    Ok((out, c, min / c))
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// One scaled, deflated double half-step:
/// `h2 <- c_k diag(|A1 h1|)^-2 A1 h1`, then
/// `h1 <- c_k+1 diag(|A2_hat h2|)^-2 A2_hat h2`.
pub fn mdem_step(state: &mut MdemState, ops: &TransferOperators, defl: &DeflationData) -> Result<()> {
    let (h2, c_k, min2) = scaled_inversion(&mul_complex(&ops.a1, &state.h1), "A1 h1")?;
    let (h1, c_k1, min1) = scaled_inversion(&mul_complex(&defl.a2_hat, &h2), "A2_hat h2")?;
    state.residuals_h1.push(distance(&h1, &state.h1));
    state.residuals_h2.push(distance(&h2, &state.h2));
    state.scalings.push([c_k, c_k1]);
    state.scaled_minima.push([min2, min1]);
    state.h1 = h1;
    state.h2 = h2;
    state.history.push(state.h1.clone());
    state.step += 1;
    Ok(())
}

/// Rebuilds every vertex value from converged southern boundary data: solve
/// the southern interior, invert the whole vector, then solve the northern
/// interior from the resulting northern boundary values.
pub fn reconstruct(ops: &TransferOperators, h1: &[Complex64]) -> Result<Vec<Complex64>> {
    let [south, north] = &ops.hemispheres;
    if h1.len() != south.partition.n_boundary() {
        return Err(Error::DimensionMismatch { expected: south.partition.n_boundary(), found: h1.len() });
    }
    let mut h = ops.southern_setup.clone();
    for (&v, &z) in south.partition.boundary.iter().zip(h1) {
        h[v] = z;
    }
    south.solve_in_place(&mut h)?;
    let mut h = invert_plane(&h)?;
    north.solve_in_place(&mut h)?;
    Ok(h)
}

/// Reconstruction, median normalization and inverse projection.
pub fn spherical_map(ops: &TransferOperators, h1: &[Complex64]) -> Result<Vec<crate::geometry::Point3>> {
    inverse_stereo(&median_normalize(&reconstruct(ops, h1)?)?)
}

/// Everything the iteration needs, built once per mesh and radius.
pub struct MdemSetup {
    pub system: LaplacianSystem,
    pub initial: InitialMap,
    pub ops: TransferOperators,
    pub deflation: DeflationData,
}

/// Validates the mesh, builds the initial map, freezes the partitions and
/// forms the deflated transfer operators.
pub fn prepare(mesh: &Mesh, rho: f64) -> Result<MdemSetup> {
    validate_genus_zero(mesh).into_result()?;
    let system = assemble_cotangent_laplacian(mesh)?;
    let initial = initial_spherical_map(mesh, &system)?;
    let h = stereo_project(&initial.f)?;
    let ops = build_transfer_operators(&system, mesh, &h, rho)?;
    let deflation = deflation_vector(&ops)?;
    log::info!(
        "mdem: n = {}, m1 = {}, m2 = {}, Perron vector in {} iterations",
        mesh.n_vertices(),
        ops.m1(),
        ops.m2(),
        deflation.perron_iterations
    );
    Ok(MdemSetup { system, initial, ops, deflation })
}

pub fn run_mdem(mesh: &Mesh, options: &MdemOptions) -> Result<Parameterization> {
    let started = Instant::now();
    let MdemSetup { system, initial, ops, deflation: defl } = prepare(mesh, options.rho)?;

    let mut state = MdemState::new(&ops)?;
    let mut energies = Vec::new();
    let mut converged = false;
    for _ in 0..options.max_iter {
        mdem_step(&mut state, &ops, &defl)?;
        if options.track_energy {
            let f = spherical_map(&ops, &state.h1)?;
            energies.push(Energy::new(dirichlet_energy(&system, &f)?));
        }
        if state.converged(options.tol) {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("mdem: not converged after {} iterations", state.step);
    }

    let f = spherical_map(&ops, &state.h1)?;
    let energy = Energy::new(dirichlet_energy(&system, &f)?);
    let distortion = angle_distortion(mesh, &f)?;
    let certificate = if options.certify && state.step > 0 {
        let eta = track_eta(&state.scaled_minima)?;
        Some(convergence_certificate(&defl, &ops, eta)?)
    } else {
        None
    };
    let r_linear = if state.history.len() >= 2 {
        let series = r_linear_series(&state.history, &state.h1)?;
        let k_star = r_linear_k_star(&series);
        Some(RLinearSeries { series, k_star })
    } else {
        None
    };

    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        algorithm: Algorithm::Mdem,
        n: mesh.n_vertices(),
        m1: ops.m1(),
        m2: ops.m2(),
        rho: options.rho,
        tol: options.tol,
        max_iter: options.max_iter,
        iterations: state.step,
        converged,
        energy,
        energies,
        residuals_h1: state.residuals_h1,
        residuals_h2: state.residuals_h2,
        scalings: state.scalings,
        certificate,
        distortion,
        r_linear,
        initial,
        conventions: Conventions::default(),
        wall_time: Some(started.elapsed().as_secs_f64()),
    };
    Ok(Parameterization { f, report })
}
