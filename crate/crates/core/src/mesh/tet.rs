//! Structured tetrahedral meshes of a box.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{BoxFace, PorousDomain, Vec3};
use crate::Scalar;

pub const NO_NEIGHBOR: usize = usize::MAX;

/// Boundary face of a tetrahedron: the face opposite local vertex `local`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryFace {
    pub tet: usize,
    pub local: usize,
    pub face: BoxFace,
}

#[derive(Clone, Debug)]
pub struct TetMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub tets: Vec<[usize; 4]>,
    pub tags: Vec<usize>,
    /// `neighbors[t][k]` shares the face opposite local vertex k, or `NO_NEIGHBOR`.
    pub neighbors: Vec<[usize; 4]>,
    pub boundary_faces: Vec<BoundaryFace>,
    /// Largest element diameter.
    pub h_param: T,
}

/// Volume and barycentric gradients of one tetrahedron.
#[derive(Clone, Copy, Debug)]
pub struct TetGeometry<T> {
    pub volume: T,
    pub grads: [Vec3<T>; 4],
}

/// Local vertex triples of the four faces; face k is opposite vertex k.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Number of cells per axis needed for spacing at most `delta` along an edge of `len`.
pub fn divisions<T: Scalar>(len: T, delta: T) -> usize {
    let r = (len / delta).as_f64();
    ((r * (1.0 - 1e-12)).ceil() as usize).max(1)
}

/// Box mesh with `ceil(edge / delta)` cubes per axis, each split into six tetrahedra.
pub fn build_box_tet_mesh<T: Scalar>(domain: &PorousDomain<T>, delta: T) -> Result<TetMesh<T>> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "mesh size must be positive, got {delta}"
        )));
    }
    let e = domain.max - domain.min;
    let n = [divisions(e.x, delta), divisions(e.y, delta), divisions(e.z, delta)];
    build_box_tet_mesh_with_divisions(domain, n)
}

/// Kuhn tetrahedralization of an `n[0] x n[1] x n[2]` grid of cubes.
pub fn build_box_tet_mesh_with_divisions<T: Scalar>(domain: &PorousDomain<T>, n: [usize; 3]) -> Result<TetMesh<T>> {
    if n.contains(&0) {
        return Err(Error::InvalidParameter("grid divisions must be positive".into()));
    }
    let (lo, hi) = (domain.min, domain.max);
    let coord = |axis: usize, i: usize| {
        let t = T::from_usize_lossy(i) / T::from_usize_lossy(n[axis]);
        if i == n[axis] {
            hi.get(axis)
        } else {
            lo.get(axis) + (hi.get(axis) - lo.get(axis)) * t
        }
    };
    let (nx, ny, nz) = (n[0] + 1, n[1] + 1, n[2] + 1);
    let vid = |i: usize, j: usize, k: usize| (k * ny + j) * nx + i;
    let mut vertices = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                vertices.push(Vec3::new(coord(0, i), coord(1, j), coord(2, k)));
            }
        }
    }
    const PATHS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::with_capacity(6 * n[0] * n[1] * n[2]);
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                for path in PATHS {
                    let mut c = [i, j, k];
                    let mut tet = [vid(i, j, k); 4];
                    for (s, &axis) in path.iter().enumerate() {
                        c[axis] += 1;
                        tet[s + 1] = vid(c[0], c[1], c[2]);
                    }
                    tets.push(tet);
                }
            }
        }
    }
    TetMesh::new(vertices, tets, None, domain)
}

impl<T: Scalar> TetMesh<T> {
    /// Orients every tet positively and derives adjacency and boundary tags.
    pub fn new(
        vertices: Vec<Vec3<T>>,
        mut tets: Vec<[usize; 4]>,
        tags: Option<Vec<usize>>,
        domain: &PorousDomain<T>,
    ) -> Result<Self> {
        let nt = tets.len();
        let tags = tags.unwrap_or_else(|| vec![0; nt]);
        let mut h = T::zero();
        for t in tets.iter_mut() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidGeometry(format!("tet {t:?} references a missing vertex")));
            }
            let p = t.map(|v| vertices[v]);
            let vol6 = (p[1] - p[0]).cross(p[2] - p[0]).dot(p[3] - p[0]);
            if vol6 == T::zero() {
                return Err(Error::InvalidGeometry(format!("degenerate tet {t:?}")));
            }
            if vol6 < T::zero() {
                t.swap(2, 3);
            }
            for a in 0..4 {
                for b in a + 1..4 {
                    h = h.max((p[a] - p[b]).norm());
                }
            }
        }
        let mut neighbors = vec![[NO_NEIGHBOR; 4]; nt];
        let mut open: HashMap<[usize; 3], (usize, usize)> = HashMap::with_capacity(2 * nt);
        for (t, tet) in tets.iter().enumerate() {
            for (k, f) in TET_FACES.iter().enumerate() {
                let mut key = f.map(|l| tet[l]);
                key.sort_unstable();
                if let Some((u, l)) = open.remove(&key) {
                    neighbors[t][k] = u;
                    neighbors[u][l] = t;
                } else {
                    open.insert(key, (t, k));
                }
            }
        }
        let eps = domain.eps_geo();
        let mut boundary_faces: Vec<BoundaryFace> = open
            .into_values()
            .filter_map(|(tet, local)| {
                let verts = TET_FACES[local].map(|l| vertices[tets[tet][l]]);
                BoxFace::ALL
                    .into_iter()
                    .find(|&face| verts.iter().all(|&p| domain.faces_of(p, eps).any(|g| g == face)))
                    .map(|face| BoundaryFace { tet, local, face })
            })
            .collect();
        boundary_faces.sort_unstable_by_key(|f| (f.tet, f.local));
        Ok(Self {
            vertices,
            tets,
            tags,
            neighbors,
            boundary_faces,
            h_param: h,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn points(&self, t: usize) -> [Vec3<T>; 4] {
        self.tets[t].map(|v| self.vertices[v])
    }

    pub fn geometry(&self, t: usize) -> TetGeometry<T> {
        let p = self.points(t);
        let (a, b, c) = (p[1] - p[0], p[2] - p[0], p[3] - p[0]);
        let det = a.cross(b).dot(c);
        // Rows of the inverse Jacobian are the gradients of barycentric coordinates 1..3.
        let g1 = b.cross(c) / det;
        let g2 = c.cross(a) / det;
        let g3 = a.cross(b) / det;
        TetGeometry {
            volume: det / T::lit(6.0),
            grads: [-(g1 + g2 + g3), g1, g2, g3],
        }
    }

    pub fn volume(&self, t: usize) -> T {
        self.geometry(t).volume
    }

    pub fn centroid(&self, t: usize) -> Vec3<T> {
        let p = self.points(t);
        (p[0] + p[1] + p[2] + p[3]) * T::lit(0.25)
    }

    pub fn barycentric(&self, t: usize, x: Vec3<T>) -> [T; 4] {
        let p = self.points(t);
        let g = self.geometry(t);
        let l1 = g.grads[1].dot(x - p[0]);
        let l2 = g.grads[2].dot(x - p[0]);
        let l3 = g.grads[3].dot(x - p[0]);
        [T::one() - l1 - l2 - l3, l1, l2, l3]
    }

    /// Bounding box of one tet.
    pub fn bbox(&self, t: usize) -> (Vec3<T>, Vec3<T>) {
        let p = self.points(t);
        let mut lo = p[0];
        let mut hi = p[0];
        for q in &p[1..] {
            lo = Vec3::new(lo.x.min(q.x), lo.y.min(q.y), lo.z.min(q.z));
            hi = Vec3::new(hi.x.max(q.x), hi.y.max(q.y), hi.z.max(q.z));
        }
        (lo, hi)
    }

    /// Evaluates a P1 field inside tet `t`.
    pub fn interpolate(&self, t: usize, values: &[T], x: Vec3<T>) -> T {
        let l = self.barycentric(t, x);
        (0..4).fold(T::zero(), |s, k| s + l[k] * values[self.tets[t][k]])
    }

    pub fn total_volume(&self) -> T {
        (0..self.n_tets()).map(|t| self.volume(t)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cube() -> PorousDomain<f64> {
        PorousDomain::insulated_box(Vec3::zero(), Vec3::new(1.0, 1.0, 1.0)).unwrap()
    }

    #[test]
    fn single_cube_has_six_tets() {
        let m = build_box_tet_mesh(&unit_cube(), 1.0).unwrap();
        assert_eq!(m.n_tets(), 6);
        assert!((m.total_volume() - 1.0).abs() < 1e-14);
        assert_eq!(m.boundary_faces.len(), 12);
    }

    #[test]
    fn halved_cube_counts_and_volume() {
        let m = build_box_tet_mesh(&unit_cube(), 0.5).unwrap();
        assert_eq!(m.n_tets(), 48);
        assert!((m.total_volume() - 1.0).abs() < 1e-12);
        for t in 0..m.n_tets() {
            assert!(m.volume(t) > 0.0);
            for (k, &u) in m.neighbors[t].iter().enumerate() {
                if u != NO_NEIGHBOR {
                    assert!(m.neighbors[u].contains(&t), "asymmetric at {t}/{k}");
                }
            }
        }
        assert_eq!(m.boundary_faces.len(), 6 * 2 * 4);
    }

    #[test]
    fn barycentric_gradients_sum_to_zero() {
        let m = build_box_tet_mesh(&unit_cube(), 0.5).unwrap();
        for t in 0..m.n_tets() {
            let g = m.geometry(t);
            let s = g.grads[0] + g.grads[1] + g.grads[2] + g.grads[3];
            assert!(s.norm() < 1e-12);
            let c = m.centroid(t);
            let l = m.barycentric(t, c);
            assert!(l.iter().all(|&x| (x - 0.25).abs() < 1e-12));
        }
    }

    #[test]
    fn rejects_nonpositive_size() {
        assert!(matches!(
            build_box_tet_mesh(&unit_cube(), 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }
}
