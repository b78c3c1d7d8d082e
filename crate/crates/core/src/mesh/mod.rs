//! Triangle meshes: storage, combinatorial adjacency, loading and validation.

mod io;
mod validate;

pub use io::{read_mesh, read_obj, read_off, write_mesh, write_obj, write_off, MeshFormat};
pub use validate::{validate_genus_zero, ValidationFailure, ValidationReport};

use crate::error::{Error, Result};
use crate::geometry::{corner_angle, triangle_area, Point3};

/// Relative area below which a face counts as degenerate.
pub const DEGENERATE_AREA_RATIO: f64 = 1e-14;

/// An indexed triangle mesh with derived edge list and vertex adjacency.
///
/// Connectivity is immutable after construction; geometry can be replaced
/// with [`Mesh::with_vertices`], which reuses the combinatorial data.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point3>,
    faces: Vec<[usize; 3]>,
    /// Unordered edges stored as `[i, j]` with `i < j`, sorted.
    edges: Vec<[usize; 2]>,
    adjacency_offsets: Vec<usize>,
    adjacency: Vec<usize>,
}

impl Mesh {
    /// Builds a mesh, checking that every face references three distinct,
    /// in-range vertices. No topological validation is done here.
    pub fn new(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        for (fi, face) in faces.iter().enumerate() {
            for (k, &v) in face.iter().enumerate() {
                if v >= n {
                    return Err(Error::VertexOutOfRange { face: fi, index: v, n });
                }
                if face[(k + 1) % 3] == v {
                    return Err(Error::RepeatedVertex { face: fi, index: v });
                }
            }
        }

        let mut edges: Vec<[usize; 2]> = faces
            .iter()
            .flat_map(|f| {
                (0..3).map(move |k| {
                    let (a, b) = (f[k], f[(k + 1) % 3]);
                    [a.min(b), a.max(b)]
                })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();

        let mut degree = vec![0usize; n];
        for &[a, b] in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut adjacency_offsets = Vec::with_capacity(n + 1);
        adjacency_offsets.push(0);
        for d in &degree {
            adjacency_offsets.push(adjacency_offsets.last().unwrap() + d);
        }
        let mut fill = adjacency_offsets[..n].to_vec();
        let mut adjacency = vec![0usize; adjacency_offsets[n]];
        for &[a, b] in &edges {
            adjacency[fill[a]] = b;
            fill[a] += 1;
            adjacency[fill[b]] = a;
            fill[b] += 1;
        }
        for i in 0..n {
            adjacency[adjacency_offsets[i]..adjacency_offsets[i + 1]].sort_unstable();
        }

        Ok(Self { vertices, faces, edges, adjacency_offsets, adjacency })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sorted indices of the vertices sharing an edge with `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[self.adjacency_offsets[v]..self.adjacency_offsets[v + 1]]
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_faces() as i64
    }

    pub fn face_points(&self, f: usize) -> [&Point3; 3] {
        let [a, b, c] = self.faces[f];
        [&self.vertices[a], &self.vertices[b], &self.vertices[c]]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.face_points(f);
        triangle_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_faces()).map(|f| self.face_area(f)).sum()
    }

    /// Length of the bounding-box diagonal.
    pub fn bounding_diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2) + (hi[2] - lo[2]).powi(2)).sqrt()
    }

    /// Same connectivity, new vertex positions.
    ///
    /// # Panics
    /// If `vertices` does not have one entry per existing vertex.
    pub fn with_vertices(&self, vertices: Vec<Point3>) -> Mesh {
        assert_eq!(vertices.len(), self.vertices.len(), "vertex count must not change");
        Mesh { vertices, ..self.clone() }
    }

    /// Indices of faces whose area falls below [`DEGENERATE_AREA_RATIO`]
    /// times the mean face area.
    pub fn degenerate_faces(&self) -> Vec<(usize, f64)> {
        if self.faces.is_empty() {
            return Vec::new();
        }
        let areas: Vec<f64> = (0..self.n_faces()).map(|f| self.face_area(f)).collect();
        let mean = areas.iter().sum::<f64>() / areas.len() as f64;
        let threshold = DEGENERATE_AREA_RATIO * mean;
        areas.into_iter().enumerate().filter(|&(_, a)| !(a >= threshold) || a == 0.0).collect()
    }
}

/// Uniformly scales the mesh about the origin so its total area equals `target`.
pub fn normalize_area(mesh: &Mesh, target: f64) -> Result<Mesh> {
    let area = mesh.total_area();
    if !(area > 0.0) || !area.is_finite() {
        return Err(Error::ZeroArea);
    }
    let s = (target / area).sqrt();
    if s == 1.0 {
        return Ok(mesh.clone());
    }
    let vertices = mesh.vertices.iter().map(|p| [p[0] * s, p[1] * s, p[2] * s]).collect();
    Ok(mesh.with_vertices(vertices))
}

/// Interior angles of every face, in corner order.
pub fn corner_angles(mesh: &Mesh) -> Result<Vec<[f64; 3]>> {
    if let Some(&(face, area)) = mesh.degenerate_faces().first() {
        return Err(Error::DegenerateFace { face, area });
    }
    Ok((0..mesh.n_faces())
        .map(|f| {
            let [a, b, c] = mesh.face_points(f);
            [corner_angle(a, b, c), corner_angle(b, c, a), corner_angle(c, a, b)]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use std::f64::consts::PI;

    #[test]
    fn tetrahedron_counts() {
        let m = shapes::tetrahedron();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (4, 6, 4));
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.neighbors(0), &[1, 2, 3]);
    }

    #[test]
    fn rejects_bad_faces() {
        let v = vec![[0.0; 3]; 3];
        assert!(matches!(Mesh::new(v.clone(), vec![[0, 1, 3]]), Err(Error::VertexOutOfRange { .. })));
        assert!(matches!(Mesh::new(v, vec![[0, 1, 1]]), Err(Error::RepeatedVertex { .. })));
    }

    #[test]
    fn equilateral_and_right_angles() {
        let h = 3f64.sqrt() / 2.0;
        let m = Mesh::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, h, 0.0]], vec![[0, 1, 2]]).unwrap();
        for a in corner_angles(&m).unwrap()[0] {
            assert!((a - PI / 3.0).abs() < 1e-15);
        }
        let m = Mesh::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], vec![[0, 1, 2]]).unwrap();
        let a = corner_angles(&m).unwrap()[0];
        assert!((a[0] - PI / 2.0).abs() < 1e-15);
        assert!((a[1] - PI / 4.0).abs() < 1e-15);
        assert!((a[2] - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_face_is_degenerate() {
        let m = Mesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2], [0, 1, 3]],
        )
        .unwrap();
        assert!(matches!(corner_angles(&m), Err(Error::DegenerateFace { face: 0, .. })));
    }

    #[test]
    fn normalize_area_cases() {
        let m = shapes::icosahedron();
        let unit = normalize_area(&m, 1.0).unwrap();
        assert!((unit.total_area() - 1.0).abs() < 1e-14);
        let again = normalize_area(&unit, 1.0).unwrap();
        for (p, q) in unit.vertices().iter().zip(again.vertices()) {
            for k in 0..3 {
                assert!((p[k] - q[k]).abs() <= 1e-14 * p[k].abs().max(1.0));
            }
        }

        let four_pi = normalize_area(&m, 4.0 * PI).unwrap();
        assert!((four_pi.total_area() - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);

        // two unit right triangles glued into a square of area 4 after scaling by 2
        let sq = Mesh::new(
            vec![[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [2.0, 2.0, 0.0], [0.0, 2.0, 0.0]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let halved = normalize_area(&sq, 1.0).unwrap();
        for (p, q) in sq.vertices().iter().zip(halved.vertices()) {
            for k in 0..3 {
                assert_eq!(q[k], 0.5 * p[k]);
            }
        }
    }

    #[test]
    fn zero_area_is_an_error() {
        let m = Mesh::new(vec![[0.0; 3]; 3], vec![[0, 1, 2]]).unwrap();
        assert!(matches!(normalize_area(&m, 1.0), Err(Error::ZeroArea)));
    }
}
