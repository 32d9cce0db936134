//! Plain-text mesh format.
//!
//! ```text
//! tetmesh <nv> <nt>
//! x y z            (nv lines)
//! v0 v1 v2 v3 tag  (nt lines)
//! ```
//!
//! Triangle meshes use the header `trimesh <nv> <nt>`, vertex lines `x y` in the
//! fracture's local frame and element lines `v0 v1 v2 tag`. Blank lines and lines
//! starting with `#` are ignored.

use std::io::{BufRead, Write};
use std::path::Path;

use super::tet::TetMesh;
use super::tri::TriMesh;
use crate::error::{Error, Result};
use crate::geometry::{Vec2, Vec3};
use crate::Scalar;

/// Mesh data as stored on disk, before adjacency and boundary tagging.
#[derive(Clone, Debug, PartialEq)]
pub struct RawMesh<P, const N: usize> {
    pub vertices: Vec<P>,
    pub cells: Vec<[usize; N]>,
    pub tags: Vec<usize>,
}

pub type RawTetMesh<T> = RawMesh<Vec3<T>, 4>;
pub type RawTriMesh<T> = RawMesh<Vec2<T>, 3>;

pub fn write_tet_mesh<T: Scalar>(mesh: &TetMesh<T>, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "tetmesh {} {}", mesh.n_vertices(), mesh.n_tets())?;
    for p in &mesh.vertices {
        writeln!(w, "{:e} {:e} {:e}", p.x.as_f64(), p.y.as_f64(), p.z.as_f64())?;
    }
    for (t, tag) in mesh.tets.iter().zip(&mesh.tags) {
        writeln!(w, "{} {} {} {} {}", t[0], t[1], t[2], t[3], tag)?;
    }
    Ok(())
}

pub fn write_tri_mesh<T: Scalar>(mesh: &TriMesh<T>, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "trimesh {} {}", mesh.n_vertices(), mesh.n_tris())?;
    for p in &mesh.vertices {
        writeln!(w, "{:e} {:e}", p.x.as_f64(), p.y.as_f64())?;
    }
    for (t, tag) in mesh.tris.iter().zip(&mesh.tags) {
        writeln!(w, "{} {} {} {}", t[0], t[1], t[2], tag)?;
    }
    Ok(())
}

pub fn read_tet_mesh<T: Scalar>(path: &Path) -> Result<RawTetMesh<T>> {
    let file = std::fs::File::open(path)?;
    parse(
        path,
        std::io::BufReader::new(file),
        "tetmesh",
        |c| Vec3::new(T::lit(c[0]), T::lit(c[1]), T::lit(c[2])),
        3,
    )
}

pub fn read_tri_mesh<T: Scalar>(path: &Path) -> Result<RawTriMesh<T>> {
    let file = std::fs::File::open(path)?;
    parse(
        path,
        std::io::BufReader::new(file),
        "trimesh",
        |c| Vec2::new(T::lit(c[0]), T::lit(c[1])),
        2,
    )
}

pub fn parse_tet_mesh<T: Scalar>(text: &str) -> Result<RawTetMesh<T>> {
    parse(
        Path::new("<memory>"),
        text.as_bytes(),
        "tetmesh",
        |c| Vec3::new(T::lit(c[0]), T::lit(c[1]), T::lit(c[2])),
        3,
    )
}

pub fn parse_tri_mesh<T: Scalar>(text: &str) -> Result<RawTriMesh<T>> {
    parse(
        Path::new("<memory>"),
        text.as_bytes(),
        "trimesh",
        |c| Vec2::new(T::lit(c[0]), T::lit(c[1])),
        2,
    )
}

fn parse<P, const N: usize>(
    path: &Path,
    reader: impl BufRead,
    keyword: &str,
    make: impl Fn(&[f64]) -> P,
    dim: usize,
) -> Result<RawMesh<P, N>> {
    let err = |line: usize, message: String| Error::MeshFormat {
        path: path.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut lines = Vec::new();
    for (k, l) in reader.lines().enumerate() {
        let l = l?;
        let t = l.trim();
        if !t.is_empty() && !t.starts_with('#') {
            lines.push((k + 1, t.to_string()));
        }
    }
    let mut it = lines.into_iter();
    let (ln, header) = it.next().ok_or_else(|| err(0, "empty file".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 || h[0] != keyword {
        return Err(err(ln, format!("expected header `{keyword} <nv> <nc>`")));
    }
    let count = |s: &str| s.parse::<usize>().map_err(|e| err(ln, format!("bad count `{s}`: {e}")));
    let (nv, nc) = (count(h[1])?, count(h[2])?);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = it
            .next()
            .ok_or_else(|| err(0, "unexpected end of vertex list".into()))?;
        let c: Vec<f64> = l
            .split_whitespace()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| err(ln, format!("bad coordinate `{s}`: {e}")))
            })
            .collect::<Result<_>>()?;
        if c.len() != dim {
            return Err(err(ln, format!("expected {dim} coordinates, found {}", c.len())));
        }
        vertices.push(make(&c));
    }
    let mut cells = Vec::with_capacity(nc);
    let mut tags = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, l) = it
            .next()
            .ok_or_else(|| err(0, "unexpected end of element list".into()))?;
        let c: Vec<usize> = l
            .split_whitespace()
            .map(|s| s.parse::<usize>().map_err(|e| err(ln, format!("bad index `{s}`: {e}"))))
            .collect::<Result<_>>()?;
        if c.len() != N + 1 {
            return Err(err(ln, format!("expected {} integers, found {}", N + 1, c.len())));
        }
        let mut cell = [0usize; N];
        cell.copy_from_slice(&c[..N]);
        if let Some(&bad) = cell.iter().find(|&&v| v >= nv) {
            return Err(err(ln, format!("vertex index {bad} out of range")));
        }
        cells.push(cell);
        tags.push(c[N]);
    }
    if let Some((ln, _)) = it.next() {
        return Err(err(ln, "trailing data after element list".into()));
    }
    Ok(RawMesh { vertices, cells, tags })
}
