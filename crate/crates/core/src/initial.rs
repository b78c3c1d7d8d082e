//! Seed map for both solvers: a big-triangle harmonic flattening of the
//! mesh with one face removed, recentered and lifted back to the sphere.
//!
//! The flattening is only fixed up to a planar translation set by how the
//! pinned corners see the rest of the mesh, so the image is recentered
//! before scaling. Without this, small asymmetries push the seed off the
//! sphere's center and neither solver pulls it back.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{cross, dot, sub, Point3};
use crate::laplacian::{dirichlet_energy, extract_subsystem, LaplacianSystem};
use crate::mesh::{corner_angles, Mesh};
use crate::plane::{inverse_stereo, median_normalize};
use crate::sparse::SparseCholesky;

/// Circumradius of the pinned triangle as a multiple of the mesh diameter.
pub const ANCHOR_SCALE: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct Flattening {
    pub anchor_face: usize,
    /// Planar position of every vertex; the anchor's corners sit on the
    /// pinned triangle.
    pub positions: Vec<Complex64>,
    /// Max-norm residual of the interior Laplace solve.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InitialMap {
    #[serde(skip)]
    pub f: Vec<Point3>,
    /// Vertex mapped closest to the north pole.
    pub pole_vertex: usize,
    /// Dirichlet energy of `f`.
    pub quality: f64,
    /// Image triangles whose chordal normal points into the sphere.
    pub flipped_faces: usize,
}

/// Face whose smallest corner angle is largest (lowest index on ties).
pub fn anchor_face(mesh: &Mesh) -> Result<usize> {
    let angles = corner_angles(mesh)?;
    let mut best = (0, f64::NEG_INFINITY);
    for (i, a) in angles.iter().enumerate() {
        let m = a[0].min(a[1]).min(a[2]);
        if m > best.1 {
            best = (i, m);
        }
    }
    Ok(best.0)
}

/// Pins the anchor face's corners to an equilateral triangle centered at the
/// origin and solves the Laplace equation for every other vertex.
///
/// The corners go clockwise so the punctured surface, whose boundary runs
/// opposite to the anchor face, lands counterclockwise.
pub fn harmonic_flattening(mesh: &Mesh, system: &LaplacianSystem) -> Result<Flattening> {
    let face = anchor_face(mesh)?;
    let anchor = mesh.faces()[face];
    let radius = ANCHOR_SCALE * mesh.bounding_diameter();
    let mut positions = vec![Complex64::new(0.0, 0.0); mesh.n_vertices()];
    for (k, &v) in anchor.iter().enumerate() {
        let t = std::f64::consts::FRAC_PI_2 - k as f64 * 2.0 * std::f64::consts::PI / 3.0;
        positions[v] = Complex64::from_polar(radius, t);
    }
    let mut pinned = anchor.to_vec();
    pinned.sort_unstable();
    let free: Vec<usize> = (0..mesh.n_vertices()).filter(|v| pinned.binary_search(v).is_err()).collect();
    if free.is_empty() {
        return Err(Error::InitialMap("mesh has no free vertex to flatten".into()));
    }

    let (l, b) = extract_subsystem(system, &free, &pinned)?;
    let boundary: Vec<Complex64> = pinned.iter().map(|&v| positions[v]).collect();
    let rhs: Vec<Complex64> = b.mul_complex(&boundary).into_iter().map(|z| -z).collect();
    let x = SparseCholesky::factor(&l)?.solve_complex(&rhs)?;

    let lx = l.mul_complex(&x);
    let residual = lx.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    for (&v, z) in free.iter().zip(&x) {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InitialMap(format!("flattening is not finite at vertex {v}")));
        }
        positions[v] = *z;
    }
    Ok(Flattening { anchor_face: face, positions, residual })
}

/// Number of faces whose image triangle faces the sphere's center.
pub fn count_flipped(mesh: &Mesh, f: &[Point3]) -> usize {
    mesh.faces()
        .iter()
        .filter(|&&[a, b, c]| {
            let n = cross(&sub(&f[b], &f[a]), &sub(&f[c], &f[a]));
            let centroid = [f[a][0] + f[b][0] + f[c][0], f[a][1] + f[b][1] + f[c][1], f[a][2] + f[b][2] + f[c][2]];
            dot(&n, &centroid) < 0.0
        })
        .count()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

/// Componentwise median of planar positions.
pub fn coordinate_median(h: &[Complex64]) -> Complex64 {
    Complex64::new(median(h.iter().map(|z| z.re).collect()), median(h.iter().map(|z| z.im).collect()))
}

/// Point minimizing the summed distance to `h`, by Weiszfeld iteration from
/// the coordinate median. Unlike the coordinate median it commutes with
/// rotations, so a symmetric flattening stays centered on its symmetry axis.
pub fn geometric_median(h: &[Complex64]) -> Complex64 {
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut c = coordinate_median(h);
    for _ in 0..1000 {
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
        for z in h {
            let d = (z - c).norm();
            // A data point at the current estimate is skipped; the fixed point
            // there is still a valid minimizer for our purposes.
            if d > 1e-14 * scale {
                num += z / d;
                den += 1.0 / d;
            }
        }
        if den == 0.0 {
            break;
        }
        let next = num / den;
        let step = (next - c).norm();
        c = next;
        if step <= 1e-14 * scale {
            break;
        }
    }
    c
}

/// Flattens, recenters on the geometric median, scales by the median
/// modulus so about half the vertices fall in each hemisphere, and lifts with the inverse stereographic projection.
/// If most image triangles come out inverted the plane is reflected.
pub fn initial_spherical_map(mesh: &Mesh, system: &LaplacianSystem) -> Result<InitialMap> {
    let flat = harmonic_flattening(mesh, system)?;
    let center = geometric_median(&flat.positions);
    let centered: Vec<Complex64> = flat.positions.iter().map(|z| z - center).collect();
    let mut h = median_normalize(&centered)?;
    let mut f = inverse_stereo(&h)?;
    let mut flipped = count_flipped(mesh, &f);
    if 2 * flipped > mesh.n_faces() {
        for z in &mut h {
            *z = z.conj();
        }
        f = inverse_stereo(&h)?;
        flipped = count_flipped(mesh, &f);
    }
    if flipped > 0 {
        log::warn!("initial map: {flipped} of {} image triangles are inverted", mesh.n_faces());
    }
    let pole_vertex = h
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best })
        .0;
    let quality = dirichlet_energy(system, &f)?;
    Ok(InitialMap { f, pole_vertex, quality, flipped_faces: flipped })
}
