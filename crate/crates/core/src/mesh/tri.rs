//! Triangular meshes of convex fracture polygons, in the fracture's local frame.

use std::collections::HashMap;

use super::tet::divisions;
use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, ConvexPolygon2, Fracture, Vec2};
use crate::Scalar;

pub use super::tet::NO_NEIGHBOR;

/// Boundary edge of a triangle: the edge opposite local vertex `local`, lying on
/// polygon edge `edge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub tri: usize,
    pub local: usize,
    pub edge: usize,
}

#[derive(Clone, Debug)]
pub struct TriMesh<T> {
    pub vertices: Vec<Vec2<T>>,
    pub tris: Vec<[usize; 3]>,
    pub tags: Vec<usize>,
    pub neighbors: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub h_param: T,
}

#[derive(Clone, Copy, Debug)]
pub struct TriGeometry<T> {
    pub area: T,
    pub grads: [Vec2<T>; 3],
}

/// Structured mesh of the fracture polygon with edge length about `delta`.
pub fn build_fracture_tri_mesh<T: Scalar>(fracture: &Fracture<T>, delta: T, eps: T) -> Result<TriMesh<T>> {
    build_polygon_tri_mesh(&fracture.polygon, delta, eps)
}

/// Divisions along a length, rounded up to a power of two so that meshes whose sizes
/// differ by a power of two are nested.
fn nested_divisions<T: Scalar>(len: T, delta: T) -> usize {
    divisions(len, delta).next_power_of_two()
}

/// Quadrilaterals are meshed through their bilinear map, triangles by uniform
/// subdivision, and other convex polygons by subdividing a centroid fan. Division
/// counts are powers of two.
pub fn build_polygon_tri_mesh<T: Scalar>(poly: &ConvexPolygon2<T>, delta: T, eps: T) -> Result<TriMesh<T>> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "mesh size must be positive, got {delta}"
        )));
    }
    let v = poly.vertices();
    let mut merger = PointMerger::new(delta * T::lit(1e-6));
    let mut tris = Vec::new();
    match v.len() {
        3 => {
            let n = (0..3)
                .map(|k| nested_divisions((v[(k + 1) % 3] - v[k]).norm(), delta))
                .max()
                .unwrap();
            refine_triangle(v[0], v[1], v[2], n, &mut merger, &mut tris);
        }
        4 => {
            let len = |a: usize, b: usize| (v[b] - v[a]).norm();
            let n1 = nested_divisions(len(0, 1).max(len(3, 2)), delta);
            let n2 = nested_divisions(len(0, 3).max(len(1, 2)), delta);
            let at = |i: usize, j: usize| {
                let s = T::from_usize_lossy(i) / T::from_usize_lossy(n1);
                let t = T::from_usize_lossy(j) / T::from_usize_lossy(n2);
                let one = T::one();
                v[0] * ((one - s) * (one - t)) + v[1] * (s * (one - t)) + v[2] * (s * t) + v[3] * ((one - s) * t)
            };
            let mut id = vec![0usize; (n1 + 1) * (n2 + 1)];
            for j in 0..=n2 {
                for i in 0..=n1 {
                    id[j * (n1 + 1) + i] = merger.insert(at(i, j));
                }
            }
            let g = |i: usize, j: usize| id[j * (n1 + 1) + i];
            for j in 0..n2 {
                for i in 0..n1 {
                    tris.push([g(i, j), g(i + 1, j), g(i + 1, j + 1)]);
                    tris.push([g(i, j), g(i + 1, j + 1), g(i, j + 1)]);
                }
            }
        }
        _ => {
            let c = poly.centroid();
            let n = poly
                .edges()
                .map(|(a, b)| (b - a).norm().max((a - c).norm()))
                .map(|l| nested_divisions(l, delta))
                .max()
                .unwrap();
            for (a, b) in poly.edges() {
                refine_triangle(c, a, b, n, &mut merger, &mut tris);
            }
        }
    }
    TriMesh::new(merger.points, tris, None, poly, eps)
}

fn refine_triangle<T: Scalar>(
    a: Vec2<T>,
    b: Vec2<T>,
    c: Vec2<T>,
    n: usize,
    merger: &mut PointMerger<T>,
    tris: &mut Vec<[usize; 3]>,
) {
    let nn = T::from_usize_lossy(n);
    let mut id = HashMap::new();
    for i in 0..=n {
        for j in 0..=n - i {
            let p = a + (b - a) * (T::from_usize_lossy(i) / nn) + (c - a) * (T::from_usize_lossy(j) / nn);
            id.insert((i, j), merger.insert(p));
        }
    }
    for i in 0..n {
        for j in 0..n - i {
            tris.push([id[&(i, j)], id[&(i + 1, j)], id[&(i, j + 1)]]);
            if i + j + 2 <= n {
                tris.push([id[&(i + 1, j)], id[&(i + 1, j + 1)], id[&(i, j + 1)]]);
            }
        }
    }
}

/// Deduplicates points closer than `tol` using a hash grid.
struct PointMerger<T> {
    tol: T,
    cells: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Vec2<T>>,
}

impl<T: Scalar> PointMerger<T> {
    fn new(tol: T) -> Self {
        Self {
            tol,
            cells: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn key(&self, p: Vec2<T>) -> (i64, i64) {
        let s = (T::lit(4.0) * self.tol).as_f64();
        ((p.x.as_f64() / s).floor() as i64, (p.y.as_f64() / s).floor() as i64)
    }

    fn insert(&mut self, p: Vec2<T>) -> usize {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.cells.get(&(kx + dx, ky + dy)) {
                    if let Some(&i) = ids.iter().find(|&&i| (self.points[i] - p).norm() <= self.tol) {
                        return i;
                    }
                }
            }
        }
        let i = self.points.len();
        self.points.push(p);
        self.cells.entry((kx, ky)).or_default().push(i);
        i
    }
}

impl<T: Scalar> TriMesh<T> {
    /// Orients triangles counterclockwise, derives adjacency, and tags boundary edges
    /// with the polygon edge they lie on.
    pub fn new(
        vertices: Vec<Vec2<T>>,
        mut tris: Vec<[usize; 3]>,
        tags: Option<Vec<usize>>,
        poly: &ConvexPolygon2<T>,
        eps: T,
    ) -> Result<Self> {
        let nt = tris.len();
        let tags = tags.unwrap_or_else(|| vec![0; nt]);
        let mut h = T::zero();
        for t in tris.iter_mut() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidGeometry(format!(
                    "triangle {t:?} references a missing vertex"
                )));
            }
            let p = t.map(|v| vertices[v]);
            let a2 = (p[1] - p[0]).cross(p[2] - p[0]);
            if a2 == T::zero() {
                return Err(Error::InvalidGeometry(format!("degenerate triangle {t:?}")));
            }
            if a2 < T::zero() {
                t.swap(1, 2);
            }
            for k in 0..3 {
                h = h.max((p[k] - p[(k + 1) % 3]).norm());
            }
        }
        let mut neighbors = vec![[NO_NEIGHBOR; 3]; nt];
        let mut open: HashMap<(usize, usize), (usize, usize)> = HashMap::with_capacity(2 * nt);
        for (t, tri) in tris.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let key = (a.min(b), a.max(b));
                if let Some((u, l)) = open.remove(&key) {
                    neighbors[t][k] = u;
                    neighbors[u][l] = t;
                } else {
                    open.insert(key, (t, k));
                }
            }
        }
        let pv = poly.vertices();
        let mut boundary_edges: Vec<BoundaryEdge> = open
            .into_values()
            .filter_map(|(tri, local)| {
                let a = vertices[tris[tri][(local + 1) % 3]];
                let b = vertices[tris[tri][(local + 2) % 3]];
                (0..pv.len())
                    .find(|&e| {
                        let (p, q) = (pv[e], pv[(e + 1) % pv.len()]);
                        point_segment_distance(a, p, q) <= eps && point_segment_distance(b, p, q) <= eps
                    })
                    .map(|edge| BoundaryEdge { tri, local, edge })
            })
            .collect();
        boundary_edges.sort_unstable_by_key(|e| (e.tri, e.local));
        Ok(Self {
            vertices,
            tris,
            tags,
            neighbors,
            boundary_edges,
            h_param: h,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_tris(&self) -> usize {
        self.tris.len()
    }

    pub fn points(&self, t: usize) -> [Vec2<T>; 3] {
        self.tris[t].map(|v| self.vertices[v])
    }

    pub fn polygon(&self, t: usize) -> ConvexPolygon2<T> {
        let p = self.points(t);
        ConvexPolygon2::triangle(p[0], p[1], p[2])
    }

    pub fn geometry(&self, t: usize) -> TriGeometry<T> {
        let p = self.points(t);
        let (e1, e2) = (p[1] - p[0], p[2] - p[0]);
        let d = e1.cross(e2);
        let g1 = Vec2::new(e2.y, -e2.x) / d;
        let g2 = Vec2::new(-e1.y, e1.x) / d;
        TriGeometry {
            area: d * T::lit(0.5),
            grads: [-(g1 + g2), g1, g2],
        }
    }

    pub fn area(&self, t: usize) -> T {
        self.geometry(t).area
    }

    pub fn total_area(&self) -> T {
        (0..self.n_tris()).map(|t| self.area(t)).sum()
    }

    pub fn barycentric(&self, t: usize, x: Vec2<T>) -> [T; 3] {
        let p = self.points(t);
        let g = self.geometry(t);
        let l1 = g.grads[1].dot(x - p[0]);
        let l2 = g.grads[2].dot(x - p[0]);
        [T::one() - l1 - l2, l1, l2]
    }

    pub fn interpolate(&self, t: usize, values: &[T], x: Vec2<T>) -> T {
        let l = self.barycentric(t, x);
        (0..3).fold(T::zero(), |s, k| s + l[k] * values[self.tris[t][k]])
    }

    pub fn bbox(&self, t: usize) -> (Vec2<T>, Vec2<T>) {
        let p = self.points(t);
        let lo = Vec2::new(p[0].x.min(p[1].x).min(p[2].x), p[0].y.min(p[1].y).min(p[2].y));
        let hi = Vec2::new(p[0].x.max(p[1].x).max(p[2].x), p[0].y.max(p[1].y).max(p[2].y));
        (lo, hi)
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_degrees(&self) -> T {
        let mut best = T::lit(180.0);
        for t in 0..self.n_tris() {
            let p = self.points(t);
            for k in 0..3 {
                let u = p[(k + 1) % 3] - p[k];
                let w = p[(k + 2) % 3] - p[k];
                let ang = u.cross(w).abs().atan2(u.dot(w)).to_degrees();
                best = best.min(ang);
            }
        }
        best
    }
}
