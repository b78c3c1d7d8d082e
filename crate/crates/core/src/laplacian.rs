//! Cotangent Laplacian, discrete Dirichlet energy and hemisphere subsystems.
//!
//! Sign convention: off-diagonal entries are `w_ij = -(cot a_ij + cot a_ji) / 2`
//! and the diagonal is `-sum_j w_ij`, so the matrix is positive semidefinite
//! with the constant vector in its kernel.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{corner_angle, corner_cot, Point3};
use crate::mesh::Mesh;
use crate::sparse::CsrMatrix;

/// Corners with an angle below this many radians are rejected.
pub const MIN_CORNER_ANGLE: f64 = 1e-12;

/// Off-diagonal entries above this multiple of `max |L|` clear the Delaunay flag.
pub const DELAUNAY_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct LaplacianSystem {
    matrix: CsrMatrix,
    /// Off-diagonal weight per mesh edge, in `Mesh::edges` order.
    weights: Vec<f64>,
    delaunay: bool,
}

impl LaplacianSystem {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Whether every off-diagonal entry is nonpositive, i.e. the interior
    /// subsystems are M-matrices.
    pub fn is_delaunay(&self) -> bool {
        self.delaunay
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Assembles `L_D` by accumulating each face's three cotangents into the
/// edge opposite the corner. Faces are visited in order, so the result is
/// deterministic.
pub fn assemble_cotangent_laplacian(mesh: &Mesh) -> Result<LaplacianSystem> {
    let n = mesh.n_vertices();

    // Pattern: adjacency plus diagonal, sorted per row.
    let mut row_offsets = Vec::with_capacity(n + 1);
    row_offsets.push(0);
    let mut cols = Vec::with_capacity(n + 2 * mesh.n_edges());
    for i in 0..n {
        let nb = mesh.neighbors(i);
        let split = nb.partition_point(|&j| j < i);
        cols.extend_from_slice(&nb[..split]);
        cols.push(i);
        cols.extend_from_slice(&nb[split..]);
        row_offsets.push(cols.len());
    }
    let values = vec![0.0; cols.len()];
    let mut matrix = CsrMatrix::from_parts(n, n, row_offsets, cols, values);

    let add = |m: &mut CsrMatrix, i: usize, j: usize, v: f64| {
        let (c, vals) = m.row_values_mut(i);
        let k = c.binary_search(&j).expect("edge in pattern");
        vals[k] += v;
    };

    let verts: &[Point3] = mesh.vertices();
    for (fi, f) in mesh.faces().iter().enumerate() {
        for k in 0..3 {
            let apex = f[k];
            let (b, c) = (f[(k + 1) % 3], f[(k + 2) % 3]);
            let (pa, pb, pc) = (&verts[apex], &verts[b], &verts[c]);
            let angle = corner_angle(pa, pb, pc);
            if !(angle >= MIN_CORNER_ANGLE) {
                return Err(Error::DegenerateAngle { face: fi, corner: k, angle });
            }
            let w = -0.5 * corner_cot(pa, pb, pc);
            add(&mut matrix, b, c, w);
            add(&mut matrix, c, b, w);
        }
    }

    for i in 0..n {
        let (c, vals) = matrix.row_values_mut(i);
        let d = c.binary_search(&i).expect("diagonal in pattern");
        let off: f64 = vals.iter().enumerate().filter(|&(k, _)| k != d).map(|(_, v)| *v).sum();
        vals[d] = -off;
    }

    let weights: Vec<f64> = mesh.edges().iter().map(|&[i, j]| matrix.get(i, j)).collect();
    let tol = DELAUNAY_TOLERANCE * matrix.max_abs();
    let delaunay = weights.iter().all(|&w| w <= tol);
    if !delaunay {
        let bad = weights.iter().filter(|&&w| w > tol).count();
        log::warn!("laplacian: mesh is not Delaunay ({bad} edges with positive off-diagonal weight)");
    }
    Ok(LaplacianSystem { matrix, weights, delaunay })
}

/// `1/2 trace(f^T L f)` for a map given as one 3D point per vertex.
pub fn dirichlet_energy(system: &LaplacianSystem, f: &[Point3]) -> Result<f64> {
    if f.len() != system.n() {
        return Err(Error::DimensionMismatch { expected: system.n(), found: f.len() });
    }
    let m = system.matrix();
    let mut total = 0.0;
    for (i, fi) in f.iter().enumerate() {
        let (cols, vals) = m.row(i);
        let mut lf = [0.0; 3];
        for (&j, &v) in cols.iter().zip(vals) {
            for k in 0..3 {
                lf[k] += v * f[j][k];
            }
        }
        total += fi[0] * lf[0] + fi[1] * lf[1] + fi[2] * lf[2];
    }
    Ok(0.5 * total)
}

/// `1/2 Re(h^* L h)` for a map into the complex plane.
pub fn dirichlet_energy_complex(system: &LaplacianSystem, h: &[Complex64]) -> Result<f64> {
    if h.len() != system.n() {
        return Err(Error::DimensionMismatch { expected: system.n(), found: h.len() });
    }
    let lh = system.matrix().mul_complex(h);
    Ok(0.5 * h.iter().zip(&lh).map(|(a, b)| (a.conj() * b).re).sum::<f64>())
}

/// Interior block `L_s = L[I, I]` and coupling block `B_s = L[I, B]`.
pub fn extract_subsystem(
    system: &LaplacianSystem,
    interior: &[usize],
    boundary: &[usize],
) -> Result<(CsrMatrix, CsrMatrix)> {
    if interior.is_empty() {
        return Err(Error::EmptyIndexSet("interior"));
    }
    if boundary.is_empty() {
        return Err(Error::EmptyIndexSet("boundary"));
    }
    let n = system.n();
    let mut seen = vec![false; n];
    for &i in interior {
        seen[i] = true;
    }
    if let Some(&b) = boundary.iter().find(|&&b| seen[b]) {
        return Err(Error::OverlappingIndexSets(b));
    }
    let m = system.matrix();
    Ok((m.select(interior, interior), m.select(interior, boundary)))
}
