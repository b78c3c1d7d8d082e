use std::collections::HashMap;
use std::fmt;

use super::Mesh;

/// One failed topological or geometric check.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationFailure {
    /// Edges used by a single face.
    NotClosed {
        boundary_edges: usize,
    },
    /// Edges shared by more than two faces.
    NonManifold {
        edges: usize,
    },
    /// A directed edge appears in two faces, so winding is not consistent.
    InconsistentOrientation {
        edges: usize,
    },
    Disconnected {
        components: usize,
    },
    WrongGenus {
        euler_characteristic: i64,
    },
    DegenerateFaces {
        count: usize,
        first: usize,
    },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotClosed { boundary_edges } => {
                write!(f, "not closed ({boundary_edges} boundary edges)")
            }
            Self::NonManifold { edges } => write!(f, "non-manifold ({edges} edges shared by more than two faces)"),
            Self::InconsistentOrientation { edges } => {
                write!(f, "inconsistent winding ({edges} directed edges repeated)")
            }
            Self::Disconnected { components } => write!(f, "disconnected ({components} components)"),
            Self::WrongGenus { euler_characteristic } => {
                write!(f, "wrong genus (Euler characteristic {euler_characteristic}, expected 2)")
            }
            Self::DegenerateFaces { count, first } => {
                write!(f, "{count} degenerate faces (first: face {first})")
            }
        }
    }
}

/// Outcome of [`validate_genus_zero`]; empty when the mesh passes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(crate::Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "ok");
        }
        for (i, failure) in self.failures.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{failure}")?;
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Checks that the mesh is a closed, consistently oriented, connected
/// surface of Euler characteristic 2 with no degenerate faces.
///
/// All checks run; the report lists every one that failed.
pub fn validate_genus_zero(mesh: &Mesh) -> ValidationReport {
    let mut failures = Vec::new();

    let mut undirected: HashMap<[usize; 2], u32> = HashMap::new();
    let mut directed: HashMap<(usize, usize), u32> = HashMap::new();
    for f in mesh.faces() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            *undirected.entry([a.min(b), a.max(b)]).or_default() += 1;
            *directed.entry((a, b)).or_default() += 1;
        }
    }
    let boundary_edges = undirected.values().filter(|&&c| c == 1).count();
    if boundary_edges > 0 {
        failures.push(ValidationFailure::NotClosed { boundary_edges });
    }
    let non_manifold = undirected.values().filter(|&&c| c > 2).count();
    if non_manifold > 0 {
        failures.push(ValidationFailure::NonManifold { edges: non_manifold });
    }
    let repeated = directed.values().filter(|&&c| c > 1).count();
    if repeated > 0 {
        failures.push(ValidationFailure::InconsistentOrientation { edges: repeated });
    }

    let mut uf = UnionFind::new(mesh.n_vertices());
    for f in mesh.faces() {
        uf.union(f[0], f[1]);
        uf.union(f[1], f[2]);
    }
    let components = (0..mesh.n_vertices()).filter(|&v| uf.find(v) == v).count();
    if components != 1 {
        failures.push(ValidationFailure::Disconnected { components });
    }

    let chi = mesh.euler_characteristic();
    if chi != 2 {
        failures.push(ValidationFailure::WrongGenus { euler_characteristic: chi });
    }

    let degenerate = mesh.degenerate_faces();
    if let Some(&(first, _)) = degenerate.first() {
        failures.push(ValidationFailure::DegenerateFaces { count: degenerate.len(), first });
    }

    ValidationReport { failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn closed_spheres_pass() {
        assert!(validate_genus_zero(&shapes::tetrahedron()).is_valid());
        assert!(validate_genus_zero(&shapes::icosahedron()).is_valid());
        assert!(validate_genus_zero(&shapes::icosphere(3)).is_valid());
    }

    #[test]
    fn torus_has_wrong_genus() {
        let r = validate_genus_zero(&shapes::torus(12, 8, 1.0, 0.3));
        assert_eq!(r.failures, vec![ValidationFailure::WrongGenus { euler_characteristic: 0 }]);
        let err = r.into_result().unwrap_err().to_string();
        assert!(err.contains("genus"), "{err}");
    }

    #[test]
    fn single_triangle_is_open() {
        let m = Mesh::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], vec![[0, 1, 2]]).unwrap();
        let r = validate_genus_zero(&m);
        assert!(r.failures.contains(&ValidationFailure::NotClosed { boundary_edges: 3 }));
        assert!(r.to_string().contains("not closed"));
    }

    #[test]
    fn flipped_face_is_inconsistent() {
        let t = shapes::tetrahedron();
        let mut faces = t.faces().to_vec();
        faces[0].swap(1, 2);
        let m = Mesh::new(t.vertices().to_vec(), faces).unwrap();
        let r = validate_genus_zero(&m);
        assert!(matches!(r.failures[..], [ValidationFailure::InconsistentOrientation { .. }]));
    }

    #[test]
    fn two_tetrahedra_are_disconnected() {
        let t = shapes::tetrahedron();
        let mut vertices = t.vertices().to_vec();
        vertices.extend(t.vertices().iter().map(|p| [p[0] + 5.0, p[1], p[2]]));
        let mut faces = t.faces().to_vec();
        faces.extend(t.faces().iter().map(|f| [f[0] + 4, f[1] + 4, f[2] + 4]));
        let r = validate_genus_zero(&Mesh::new(vertices, faces).unwrap());
        assert!(r.failures.contains(&ValidationFailure::Disconnected { components: 2 }));
        assert!(r.failures.contains(&ValidationFailure::WrongGenus { euler_characteristic: 4 }));
    }
}
