//! Procedural closed meshes used for testing and benchmarking.

use std::collections::HashMap;

use crate::geometry::{cross, dot, norm, sub, Point3};
use crate::mesh::Mesh;

fn outward(vertices: &[Point3], mut faces: Vec<[usize; 3]>) -> Vec<[usize; 3]> {
    for f in &mut faces {
        let (a, b, c) = (&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
        let n = cross(&sub(b, a), &sub(c, a));
        let centroid = [a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]];
        if dot(&n, &centroid) < 0.0 {
            f.swap(1, 2);
        }
    }
    faces
}

/// Regular tetrahedron inscribed in the cube `[-1, 1]^3`.
pub fn tetrahedron() -> Mesh {
    let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let f = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    Mesh::new(v, f).expect("valid tetrahedron")
}

pub fn octahedron() -> Mesh {
    let v =
        vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    let f = vec![[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]];
    let f = outward(&v, f);
    Mesh::new(v, f).expect("valid octahedron")
}

/// Regular icosahedron with vertices on the unit sphere.
pub fn icosahedron() -> Mesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let v: Vec<Point3> = raw
        .iter()
        .map(|p| {
            let r = norm(p);
            [p[0] / r, p[1] / r, p[2] / r]
        })
        .collect();
    let f = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let f = outward(&v, f);
    Mesh::new(v, f).expect("valid icosahedron")
}

/// Icosahedron refined `level` times by 1-to-4 midpoint subdivision, with
/// every vertex projected to the unit sphere. Has `10 * 4^level + 2` vertices.
pub fn icosphere(level: u32) -> Mesh {
    let base = icosahedron();
    let mut vertices = base.vertices().to_vec();
    let mut faces = base.faces().to_vec();
    for _ in 0..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point3>| -> usize {
            *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                let m = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
                let r = norm(&m);
                vertices.push([m[0] / r, m[1] / r, m[2] / r]);
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    Mesh::new(vertices, faces).expect("valid icosphere")
}

/// Structured torus with `nu` segments around the main axis and `nv`
/// around the tube.
pub fn torus(nu: usize, nv: usize, major: f64, minor: f64) -> Mesh {
    use std::f64::consts::TAU;
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let v = TAU * j as f64 / nv as f64;
            let r = major + minor * v.cos();
            vertices.push([r * u.cos(), r * u.sin(), minor * v.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    Mesh::new(vertices, faces).expect("valid torus")
}

/// Applies a per-axis scale, turning a sphere into an ellipsoid.
pub fn stretched(mesh: &Mesh, axes: [f64; 3]) -> Mesh {
    let v = mesh.vertices().iter().map(|p| [p[0] * axes[0], p[1] * axes[1], p[2] * axes[2]]).collect();
    mesh.with_vertices(v)
}

/// Moves vertex `i` along its position vector by the factor `1 + offsets[i]`.
pub fn radially_perturbed(mesh: &Mesh, offsets: &[f64]) -> Mesh {
    assert_eq!(offsets.len(), mesh.n_vertices());
    let v = mesh
        .vertices()
        .iter()
        .zip(offsets)
        .map(|(p, d)| [p[0] * (1.0 + d), p[1] * (1.0 + d), p[2] * (1.0 + d)])
        .collect();
    mesh.with_vertices(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_sizes() {
        for level in 0..4 {
            let m = icosphere(level);
            assert_eq!(m.n_vertices(), 10 * 4usize.pow(level) + 2);
            assert_eq!(m.euler_characteristic(), 2);
        }
    }

    #[test]
    fn torus_is_genus_one() {
        assert_eq!(torus(10, 6, 1.0, 0.4).euler_characteristic(), 0);
    }
}
