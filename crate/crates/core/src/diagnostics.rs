//! Convergence certificate, angle distortion, energy reporting and the
//! R-linear convergence series.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dense::{dense_spectral_radius, spectral_radius_nonnegative};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::initial::InitialMap;
use crate::mdem::{DeflationData, TransferOperators};
use crate::mesh::{corner_angles, Mesh};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Certificate radii are cross-checked against a dense eigensolve up to
/// this many boundary vertices.
pub const DENSE_CHECK_LIMIT: usize = 500;
const CERTIFICATE_TOL: f64 = 1e-10;
const CERTIFICATE_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dem,
    Mdem,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Dem => "dem",
            Algorithm::Mdem => "mdem",
        })
    }
}

/// Dirichlet energy together with its offset from `4 pi`, the image area of
/// a conformal map onto the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energy {
    pub raw: f64,
    pub minus_4pi: f64,
}

impl Energy {
    pub fn new(raw: f64) -> Self {
        Self { raw, minus_4pi: raw - FOUR_PI }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    PowerIteration,
    DenseOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub eta: f64,
    pub gamma: f64,
    /// Spectral radius of `gamma^2 |A2_hat| A1`.
    pub spectral_radius: f64,
    pub satisfied: bool,
    pub method: CertificateMethod,
    /// Collatz–Wielandt bracket from the power iteration, when it converged.
    pub bracket: Option<[f64; 2]>,
    /// Dense eigensolve value for small operators.
    pub dense_spectral_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distortion {
    /// `|theta_source - theta_image| / theta_source` per face corner, in
    /// face order.
    pub per_corner: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RLinearSeries {
    /// Entry `k - 1` holds `||h1(k) - h1(m)||_inf^(1/k)` for `k < m`.
    pub series: Vec<f64>,
    /// First `k` from which every entry is below one.
    pub k_star: Option<usize>,
}

/// Conventions behind the reported numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conventions {
    pub eta: &'static str,
    pub image_angles: &'static str,
    pub sd: &'static str,
    pub energy: &'static str,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            eta: "scaled magnitudes |A1 h1|/c_k and |A2_hat h2|/c_k+1",
            image_angles: "chordal triangles",
            sd: "population",
            energy: "raw E_D and E_D - 4pi",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub algorithm: Algorithm,
    pub n: usize,
    /// Boundary sizes of the two hemispheres (last sweep for DEM).
    pub m1: usize,
    pub m2: usize,
    pub rho: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Energy of the returned map.
    pub energy: Energy,
    /// Energy after each iteration; empty for MDEM unless tracked.
    pub energies: Vec<Energy>,
    pub residuals_h1: Vec<f64>,
    pub residuals_h2: Vec<f64>,
    /// Scaling pair `(c_k, c_k+1)` per MDEM step.
    pub scalings: Vec<[f64; 2]>,
    pub certificate: Option<Certificate>,
    pub distortion: Distortion,
    pub r_linear: Option<RLinearSeries>,
    pub initial: InitialMap,
    pub conventions: Conventions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

/// A spherical map with the report of the run that produced it.
#[derive(Debug, Clone)]
pub struct Parameterization {
    pub f: Vec<Point3>,
    pub report: RunReport,
}

/// `max_k (1 - min_i m_k[i])` over a history of scaled magnitude vectors.
pub fn track_eta<V: AsRef<[f64]>>(history: &[V]) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut eta: f64 = 0.0;
    for step in history {
        let step = step.as_ref();
        if step.is_empty() {
            return Err(Error::EmptyHistory);
        }
        let min = step.iter().copied().fold(f64::INFINITY, f64::min);
        eta = eta.max(1.0 - min);
    }
    Ok(eta)
}

pub fn gamma_from_eta(eta: f64) -> f64 {
    1.0 / ((1.0 - eta) * (1.0 - eta))
}

/// Spectral radius of `gamma^2 |A2_hat| A1` with `gamma = 1 / (1 - eta)^2`.
pub fn convergence_certificate(defl: &DeflationData, ops: &TransferOperators, eta: f64) -> Result<Certificate> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidEta(eta));
    }
    let gamma = gamma_from_eta(eta);
    let abs_a2: DMatrix<f64> = defl.a2_hat.abs();
    let m: DMatrix<f64> = (abs_a2 * &ops.a1) * (gamma * gamma);
    let dense = (m.nrows() <= DENSE_CHECK_LIMIT).then(|| dense_spectral_radius(&m));
    let (spectral_radius, method, bracket) =
        match spectral_radius_nonnegative(&m, CERTIFICATE_TOL, CERTIFICATE_MAX_ITER) {
            Ok(r) => (r.value, CertificateMethod::PowerIteration, Some([r.lower, r.upper])),
            Err(e) => match dense {
                Some(d) => {
                    log::warn!("diagnostics: {e}; using the dense eigensolve");
                    (d, CertificateMethod::DenseOracle, None)
                }
                None => return Err(e),
            },
        };
    Ok(Certificate {
        eta,
        gamma,
        spectral_radius,
        satisfied: spectral_radius < 1.0,
        method,
        bracket,
        dense_spectral_radius: dense,
    })
}

/// Relative corner-angle distortion of `f` against the source mesh, with
/// image angles measured on straight-edge triangles.
pub fn angle_distortion(mesh: &Mesh, f: &[Point3]) -> Result<Distortion> {
    if f.len() != mesh.n_vertices() {
        return Err(Error::DimensionMismatch { expected: mesh.n_vertices(), found: f.len() });
    }
    let source = corner_angles(mesh)?;
    let image = corner_angles(&mesh.with_vertices(f.to_vec())).map_err(|e| match e {
        Error::DegenerateFace { face, .. } => Error::DegenerateImage { face },
        other => other,
    })?;
    let per_corner: Vec<f64> =
        source.iter().zip(&image).flat_map(|(s, t)| (0..3).map(move |k| (s[k] - t[k]).abs() / s[k])).collect();
    let count = per_corner.len() as f64;
    let mean = per_corner.iter().sum::<f64>() / count;
    let sd = (per_corner.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / count).sqrt();
    Ok(Distortion { per_corner, mean, sd })
}

/// `||h(k) - reference||_inf^(1/k)` for `k = 1 .. m-1`, where `history[k-1]`
/// is the iterate after step `k` and the last entry (step `m`) is dropped.
pub fn r_linear_series(history: &[Vec<Complex64>], reference: &[Complex64]) -> Result<Vec<f64>> {
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    history[..history.len() - 1]
        .iter()
        .enumerate()
        .map(|(i, h)| {
            if h.len() != reference.len() {
                return Err(Error::DimensionMismatch { expected: reference.len(), found: h.len() });
            }
            let d = h.iter().zip(reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            Ok(d.powf(1.0 / (i + 1) as f64))
        })
        .collect()
}

/// Smallest `k` (1-based) such that every entry from `k` on is below one.
pub fn r_linear_k_star(series: &[f64]) -> Option<usize> {
    let tail = series.iter().rev().take_while(|&&v| v < 1.0).count();
    (tail > 0).then(|| series.len() - tail + 1)
}

/// `E(MDEM) - E(DEM)` for two runs on the same mesh.
pub fn energy_comparison(dem: &RunReport, mdem: &RunReport) -> Result<f64> {
    if dem.n != mdem.n {
        return Err(Error::MismatchedMeshes(dem.n, mdem.n));
    }
    Ok(mdem.energy.raw - dem.energy.raw)
}
