use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Split of the vertices by the disk `|h| < rho`.
///
/// All lists are in ascending vertex order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexPartition {
    /// Vertices inside the disk.
    pub interior: Vec<usize>,
    /// Every vertex not in `interior`.
    pub boundary_prime: Vec<usize>,
    /// Members of `boundary_prime` with a neighbor in `interior`.
    pub boundary: Vec<usize>,
    /// `boundary_prime` minus `boundary`.
    pub exterior: Vec<usize>,
    pub rho: f64,
}

impl IndexPartition {
    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }
}

pub fn partition_indices(mesh: &Mesh, h: &[Complex64], rho: f64) -> Result<IndexPartition> {
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::InvalidRadius(rho));
    }
    let n = mesh.n_vertices();
    if h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.len() });
    }
    let mut inside = vec![false; n];
    for (i, z) in h.iter().enumerate() {
        let r = z.norm();
        if r.is_nan() {
            return Err(Error::NonFinite { index: i });
        }
        inside[i] = r < rho;
    }

    let mut interior = Vec::new();
    let mut boundary_prime = Vec::new();
    let mut boundary = Vec::new();
    let mut exterior = Vec::new();
    for v in 0..n {
        if inside[v] {
            interior.push(v);
            continue;
        }
        boundary_prime.push(v);
        if mesh.neighbors(v).iter().any(|&u| inside[u]) {
            boundary.push(v);
        } else {
            exterior.push(v);
        }
    }
    if interior.is_empty() {
        return Err(Error::EmptyInterior { rho });
    }
    if boundary.is_empty() {
        return Err(Error::EmptyBoundary { rho });
    }
    Ok(IndexPartition { interior, boundary_prime, boundary, exterior, rho })
}
