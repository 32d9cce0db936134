//! Interface meshes: the tessellation of a fracture induced by the tetrahedral mesh.

use std::collections::VecDeque;

use rayon::prelude::*;

use super::slice::{slice_tet, PlaneContact};
use crate::error::{Error, Result};
use crate::geometry::{touches, ConvexPolygon2, Fracture, FractureNetwork, Vec2};
use crate::mesh::{TetMesh, NO_NEIGHBOR};
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Traversal {
    /// Breadth-first walk over face neighbors from one intersected tetrahedron.
    Walk,
    /// Test every tetrahedron.
    BruteForce,
}

/// Cut cells of one fracture, each a convex polygon inside one tetrahedron, fanned
/// into triangles.
#[derive(Clone, Debug)]
pub struct InterfaceMesh<T> {
    pub fracture: usize,
    /// Polygonal cells with their parent tetrahedron, sorted by tetrahedron.
    pub cells: Vec<(usize, ConvexPolygon2<T>)>,
    pub triangles: Vec<[Vec2<T>; 3]>,
    pub parent_tet: Vec<usize>,
    /// Cell each triangle subdivides.
    pub cell_of: Vec<usize>,
}

impl<T: Scalar> InterfaceMesh<T> {
    fn from_cells(fracture: usize, mut cells: Vec<(usize, ConvexPolygon2<T>)>) -> Self {
        cells.sort_by_key(|c| c.0);
        let mut triangles = Vec::new();
        let mut parent_tet = Vec::new();
        let mut cell_of = Vec::new();
        for (c, (tet, poly)) in cells.iter().enumerate() {
            for tri in poly.fan() {
                triangles.push(tri);
                parent_tet.push(*tet);
                cell_of.push(c);
            }
        }
        Self {
            fracture,
            cells,
            triangles,
            parent_tet,
            cell_of,
        }
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_polygon(&self, k: usize) -> ConvexPolygon2<T> {
        let [a, b, c] = self.triangles[k];
        ConvexPolygon2::triangle(a, b, c)
    }

    pub fn triangle_area(&self, k: usize) -> T {
        let [a, b, c] = self.triangles[k];
        (b - a).cross(c - a) * T::lit(0.5)
    }

    pub fn area(&self) -> T {
        self.cells.iter().map(|(_, p)| p.area()).sum()
    }
}

pub fn build_interface_mesh<T: Scalar>(
    mesh: &TetMesh<T>,
    fracture: &Fracture<T>,
    eps: T,
    traversal: Traversal,
) -> Result<InterfaceMesh<T>> {
    let cells = match traversal {
        Traversal::BruteForce => (0..mesh.n_tets())
            .into_par_iter()
            .filter_map(|t| cut_cell(mesh, t, fracture, eps).map(|p| (t, p)))
            .collect(),
        Traversal::Walk => walk(mesh, fracture, eps),
    };
    if cells.is_empty() {
        return Err(Error::EmptyInterface(fracture.id));
    }
    Ok(InterfaceMesh::from_cells(fracture.id, cells))
}

/// Interface meshes of every fracture, built in parallel.
pub fn build_interface_meshes<T: Scalar>(
    mesh: &TetMesh<T>,
    network: &FractureNetwork<T>,
    traversal: Traversal,
) -> Result<Vec<InterfaceMesh<T>>> {
    let eps = network.eps();
    network
        .fractures
        .par_iter()
        .map(|f| build_interface_mesh(mesh, f, eps, traversal))
        .collect()
}

fn cut_cell<T: Scalar>(mesh: &TetMesh<T>, t: usize, fracture: &Fracture<T>, eps: T) -> Option<ConvexPolygon2<T>> {
    match slice_tet(&mesh.points(t), &fracture.frame, eps) {
        PlaneContact::Cut(poly) => poly.intersect(&fracture.polygon, eps),
        _ => None,
    }
}

fn walk<T: Scalar>(mesh: &TetMesh<T>, fracture: &Fracture<T>, eps: T) -> Vec<(usize, ConvexPolygon2<T>)> {
    // Seed: any tetrahedron whose contact set with the plane meets the polygon.
    let touching = |t: usize| -> Option<PlaneContact<T>> {
        let c = slice_tet(&mesh.points(t), &fracture.frame, eps);
        touches(&fracture.polygon, c.points(), eps).then_some(c)
    };
    let Some(seed) = (0..mesh.n_tets())
        .into_par_iter()
        .find_first(|&t| touching(t).is_some())
    else {
        return Vec::new();
    };
    let mut visited = vec![false; mesh.n_tets()];
    let mut queue = VecDeque::from([seed]);
    visited[seed] = true;
    let mut cells = Vec::new();
    while let Some(t) = queue.pop_front() {
        let Some(contact) = touching(t) else { continue };
        if let PlaneContact::Cut(poly) = contact {
            if let Some(c) = poly.intersect(&fracture.polygon, eps) {
                cells.push((t, c));
            }
        }
        for &u in &mesh.neighbors[t] {
            if u != NO_NEIGHBOR && !visited[u] {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    cells
}
