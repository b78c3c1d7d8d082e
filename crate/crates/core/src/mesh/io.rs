//! OFF and OBJ readers/writers for triangle meshes.
//!
//! Only geometry and triangular faces are handled. OBJ records other than
//! `v` and `f` are skipped; OFF vertex colors and trailing face attributes
//! are ignored.

use std::io::{BufRead, Write};
use std::path::Path;

use super::Mesh;
use crate::error::{Error, Result};
use crate::geometry::Point3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    /// Picks the format from a file extension (case-insensitive).
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        match ext.as_str() {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            _ => Err(Error::UnknownFormat(path.display().to_string())),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            MeshFormat::Off => "off",
            MeshFormat::Obj => "obj",
        }
    }
}

pub fn read_mesh<R: BufRead>(reader: R, format: MeshFormat) -> Result<Mesh> {
    match format {
        MeshFormat::Off => read_off(reader),
        MeshFormat::Obj => read_obj(reader),
    }
}

pub fn write_mesh<W: Write>(mesh: &Mesh, writer: W, format: MeshFormat) -> Result<()> {
    match format {
        MeshFormat::Off => write_off(mesh, writer),
        MeshFormat::Obj => write_obj(mesh, writer),
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| parse_err(line, format!("invalid number '{tok}'")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| parse_err(line, format!("invalid index '{tok}'")))
}

/// Reads an ASCII OFF file with 0-based triangular faces.
pub fn read_off<R: BufRead>(reader: R) -> Result<Mesh> {
    // Non-empty, comment-stripped lines with their 1-based line numbers.
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim().to_string();
        if !content.is_empty() {
            lines.push((i + 1, content));
        }
    }
    let mut it = lines.into_iter();

    let (hline, header) = it.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut tokens: Vec<String> = header.split_whitespace().map(str::to_string).collect();
    if tokens.first().map(String::as_str) != Some("OFF") {
        return Err(parse_err(hline, "missing 'OFF' header"));
    }
    tokens.remove(0);
    // The counts may share the header line ("OFF 4 4 6").
    let (cline, counts) = if tokens.is_empty() {
        let (l, c) = it.next().ok_or_else(|| parse_err(hline, "missing counts line"))?;
        (l, c.split_whitespace().map(str::to_string).collect::<Vec<_>>())
    } else {
        (hline, tokens)
    };
    if counts.len() < 2 {
        return Err(parse_err(cline, "counts line must be 'V F E'"));
    }
    let nv = parse_usize(&counts[0], cline)?;
    let nf = parse_usize(&counts[1], cline)?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, text) = it.next().ok_or_else(|| parse_err(cline, "unexpected end of vertex list"))?;
        let t: Vec<&str> = text.split_whitespace().collect();
        if t.len() < 3 {
            return Err(parse_err(l, "vertex line needs three coordinates"));
        }
        vertices.push([parse_f64(t[0], l)?, parse_f64(t[1], l)?, parse_f64(t[2], l)?]);
    }

    let mut faces = Vec::with_capacity(nf);
    for fi in 0..nf {
        let (l, text) = it.next().ok_or_else(|| parse_err(cline, "unexpected end of face list"))?;
        let t: Vec<&str> = text.split_whitespace().collect();
        let count = parse_usize(t[0], l)?;
        if count != 3 {
            return Err(Error::NonTriangularFace { face: fi, count });
        }
        if t.len() < 4 {
            return Err(parse_err(l, "face line needs three indices"));
        }
        faces.push([parse_usize(t[1], l)?, parse_usize(t[2], l)?, parse_usize(t[3], l)?]);
    }
    Mesh::new(vertices, faces)
}

/// Reads the `v` and `f` records of a Wavefront OBJ file.
///
/// Face references may use the `v/vt/vn` forms and negative (relative)
/// indices.
pub fn read_obj<R: BufRead>(reader: R) -> Result<Mesh> {
    let mut vertices: Vec<Point3> = Vec::new();
    let mut faces = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let l = i + 1;
        let line = line?;
        let mut t = line.split_whitespace();
        match t.next() {
            Some("v") => {
                let c: Vec<&str> = t.collect();
                if c.len() < 3 {
                    return Err(parse_err(l, "vertex record needs three coordinates"));
                }
                vertices.push([parse_f64(c[0], l)?, parse_f64(c[1], l)?, parse_f64(c[2], l)?]);
            }
            Some("f") => {
                let refs: Vec<&str> = t.collect();
                if refs.len() != 3 {
                    return Err(Error::NonTriangularFace { face: faces.len(), count: refs.len() });
                }
                let mut face = [0usize; 3];
                for (k, r) in refs.iter().enumerate() {
                    let idx = r.split('/').next().unwrap_or("");
                    let raw: i64 = idx.parse().map_err(|_| parse_err(l, format!("invalid index '{r}'")))?;
                    let resolved = match raw {
                        0 => return Err(parse_err(l, "OBJ indices are 1-based")),
                        r if r > 0 => r as usize - 1,
                        r => {
                            let back = r.unsigned_abs() as usize;
                            if back > vertices.len() {
                                return Err(parse_err(l, format!("relative index {r} precedes the first vertex")));
                            }
                            vertices.len() - back
                        }
                    };
                    face[k] = resolved;
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    Mesh::new(vertices, faces)
}

pub fn write_off<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} {}", mesh.n_vertices(), mesh.n_faces(), mesh.n_edges())?;
    for p in mesh.vertices() {
        writeln!(w, "{} {} {}", p[0], p[1], p[2])?;
    }
    for f in mesh.faces() {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_obj<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    for p in mesh.vertices() {
        writeln!(w, "v {} {} {}", p[0], p[1], p[2])?;
    }
    for f in mesh.faces() {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TETRA_OFF: &str =
        "OFF\n# regular tetrahedron\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";

    #[test]
    fn reads_tetrahedron_off() {
        let m = read_off(TETRA_OFF.as_bytes()).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (4, 6, 4));
        assert_eq!(m.vertices()[1], [1.0, -1.0, -1.0]);
        assert_eq!(m.faces()[1], [0, 3, 1]);
    }

    #[test]
    fn reads_icosahedron_obj() {
        let ico = crate::shapes::icosahedron();
        let mut buf = Vec::new();
        write_obj(&ico, &mut buf).unwrap();
        let text = format!("# header\nvn 0 0 1\nvt 0 0\n{}", String::from_utf8(buf).unwrap());
        let m = read_obj(text.as_bytes()).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (12, 30, 20));
        assert_eq!(m, ico);
    }

    #[test]
    fn obj_slash_and_relative_indices() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2//2 -1\n";
        let m = read_obj(text.as_bytes()).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn off_roundtrip_is_exact() {
        let m = crate::shapes::icosphere(2);
        let mut buf = Vec::new();
        write_off(&m, &mut buf).unwrap();
        assert_eq!(read_off(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(read_off("OFX\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_off("OFF\n3 1 0\n0 0 0\n1 0\n".as_bytes()), Err(Error::Parse { line: 4, .. })));
        let quad = "OFF\n4 1 4\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        assert!(matches!(read_off(quad.as_bytes()), Err(Error::NonTriangularFace { face: 0, count: 4 })));
        let oob = "OFF\n3 1 3\n0 0 0\n1 0 0\n1 1 0\n3 0 1 7\n";
        assert!(matches!(read_off(oob.as_bytes()), Err(Error::VertexOutOfRange { index: 7, .. })));
        assert!(matches!(read_obj("v 0 0 0\nf 1 2 3 4\n".as_bytes()), Err(Error::NonTriangularFace { .. })));
        assert!(matches!(read_obj("v 0 0\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn format_from_path() {
        assert_eq!(MeshFormat::from_path(Path::new("a/b.OFF")).unwrap(), MeshFormat::Off);
        assert_eq!(MeshFormat::from_path(Path::new("x.obj")).unwrap(), MeshFormat::Obj);
        assert!(MeshFormat::from_path(Path::new("x.stl")).is_err());
    }
}
