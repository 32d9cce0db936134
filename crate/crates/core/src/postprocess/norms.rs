//! Discretization errors against a reference solution.

use rayon::prelude::*;

use super::analytic::AnalyticSolution;
use crate::assembly::Discretization;
use crate::geometry::{orient3d, Fracture, Vec3};
use crate::intersection::slice_tet_by_fracture;
use crate::quadrature::{bary, TET_DEG5, TRI_DEG4};
use crate::Scalar;

/// L2 errors and H1 seminorm errors of the matrix and fracture fields. Fracture values
/// aggregate all fractures.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorNorms<T> {
    pub l2_d: T,
    pub h1_d: T,
    pub l2_f: T,
    pub h1_f: T,
}

impl<T: Scalar> ErrorNorms<T> {
    /// Full H1 norm of the matrix error.
    pub fn h1_full_d(&self) -> T {
        (self.l2_d * self.l2_d + self.h1_d * self.h1_d).sqrt()
    }

    pub fn h1_full_f(&self) -> T {
        (self.l2_f * self.l2_f + self.h1_f * self.h1_f).sqrt()
    }
}

/// Convex polyhedron as a list of planar faces.
#[derive(Clone, Debug)]
struct Polyhedron<T> {
    faces: Vec<Vec<Vec3<T>>>,
}

impl<T: Scalar> Polyhedron<T> {
    fn tet(p: [Vec3<T>; 4]) -> Self {
        Self {
            faces: vec![
                vec![p[1], p[2], p[3]],
                vec![p[0], p[2], p[3]],
                vec![p[0], p[1], p[3]],
                vec![p[0], p[1], p[2]],
            ],
        }
    }

    /// Part on the side where `sign * f.signed_distance ≥ 0`.
    fn clip(&self, f: &Fracture<T>, sign: T, eps: T) -> Option<Self> {
        let s = |p: Vec3<T>| sign * f.frame.signed_distance(p);
        let mut faces = Vec::new();
        let mut cap: Vec<Vec3<T>> = Vec::new();
        for face in &self.faces {
            let mut out = Vec::new();
            for k in 0..face.len() {
                let (a, b) = (face[k], face[(k + 1) % face.len()]);
                let (sa, sb) = (s(a), s(b));
                if sa >= T::zero() {
                    out.push(a);
                    if sa <= eps {
                        cap.push(a);
                    }
                }
                if (sa > T::zero() && sb < T::zero()) || (sa < T::zero() && sb > T::zero()) {
                    let x = a + (b - a) * (sa / (sa - sb));
                    out.push(x);
                    cap.push(x);
                }
            }
            if out.len() >= 3 {
                faces.push(out);
            }
        }
        let mut uniq: Vec<Vec3<T>> = Vec::new();
        for p in cap {
            if uniq.iter().all(|q| (*q - p).norm() > eps) {
                uniq.push(p);
            }
        }
        if uniq.len() >= 3 {
            let c2 = uniq.iter().fold(Vec3::zero(), |acc, &p| acc + p) / T::from_usize_lossy(uniq.len());
            let o = f.frame.project(c2);
            uniq.sort_by(|&p, &q| {
                let (dp, dq) = (f.frame.project(p) - o, f.frame.project(q) - o);
                dp.y.atan2(dp.x)
                    .partial_cmp(&dq.y.atan2(dq.x))
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            faces.push(uniq);
        }
        let poly = Self { faces };
        (poly.faces.len() >= 4 && poly.volume() > eps * eps * eps).then_some(poly)
    }

    fn centroid(&self) -> Vec3<T> {
        let mut c = Vec3::zero();
        let mut n = 0;
        for f in &self.faces {
            for &p in f {
                c += p;
                n += 1;
            }
        }
        c / T::from_usize_lossy(n)
    }

    /// Sub-tetrahedra of a fan decomposition from the centroid.
    fn tets(&self) -> Vec<[Vec3<T>; 4]> {
        let c = self.centroid();
        let mut out = Vec::new();
        for f in &self.faces {
            for k in 1..f.len() - 1 {
                out.push([c, f[0], f[k], f[k + 1]]);
            }
        }
        out
    }

    fn volume(&self) -> T {
        self.tets()
            .iter()
            .map(|t| orient3d(t[0], t[1], t[2], t[3]).abs())
            .fold(T::zero(), |a, b| a + b)
            / T::lit(6.0)
    }
}

/// Integrates `f` over a tetrahedron given by its vertices with the degree-5 rule.
fn integrate_tet<T: Scalar>(t: &[Vec3<T>; 4], f: impl Fn(Vec3<T>) -> T) -> T {
    let vol = orient3d(t[0], t[1], t[2], t[3]).abs() / T::lit(6.0);
    let mut acc = T::zero();
    for (b, w) in TET_DEG5 {
        let b: [T; 4] = bary(b);
        let x = t[0] * b[0] + t[1] * b[1] + t[2] * b[2] + t[3] * b[3];
        acc = acc + T::lit(w) * f(x);
    }
    acc * vol
}

/// Errors of `(h_d, h_f)` against `exact`. With `split_cut_cells`, tets crossed by a
/// fracture are cut along its plane and each part is integrated separately.
pub fn error_norms<T: Scalar>(
    disc: &Discretization<T>,
    h_d: &[T],
    h_f: &[Vec<T>],
    exact: &AnalyticSolution<T>,
    split_cut_cells: bool,
) -> ErrorNorms<T> {
    let mesh = &disc.tet_mesh;
    let eps = disc.network.eps();
    let per_tet: Vec<(T, T)> = (0..mesh.n_tets())
        .into_par_iter()
        .map(|t| {
            let pts = mesh.points(t);
            let geo = mesh.geometry(t);
            let v = mesh.tets[t];
            let grad_h = (0..4).fold(Vec3::zero(), |acc, k| acc + geo.grads[k] * h_d[v[k]]);
            let mut cells = vec![Polyhedron::tet(pts)];
            if split_cut_cells {
                for f in &disc.network.fractures {
                    if slice_tet_by_fracture(&pts, f, eps).is_none() {
                        continue;
                    }
                    cells = cells
                        .iter()
                        .flat_map(|c| [c.clip(f, T::one(), eps), c.clip(f, -T::one(), eps)])
                        .flatten()
                        .collect();
                }
            }
            let (mut l2, mut h1) = (T::zero(), T::zero());
            for cell in &cells {
                for sub in cell.tets() {
                    l2 = l2
                        + integrate_tet(&sub, |x| {
                            let e = mesh.interpolate(t, h_d, x) - exact.eval(x);
                            e * e
                        });
                    h1 = h1
                        + integrate_tet(&sub, |x| {
                            let e = grad_h - exact.grad(x);
                            e.dot(e)
                        });
                }
            }
            (l2, h1)
        })
        .collect();
    let (l2_d, h1_d) = per_tet
        .iter()
        .fold((T::zero(), T::zero()), |a, b| (a.0 + b.0, a.1 + b.1));

    let (mut l2_f, mut h1_f) = (T::zero(), T::zero());
    for (i, f) in disc.network.fractures.iter().enumerate() {
        let m = &disc.h_meshes[i];
        for t in 0..m.n_tris() {
            let p = m.points(t);
            let geo = m.geometry(t);
            let v = m.tris[t];
            let grad_h = (0..3).fold(crate::geometry::Vec2::zero(), |acc, k| {
                acc + geo.grads[k] * h_f[i][v[k]]
            });
            for (b, w) in TRI_DEG4 {
                let b: [T; 3] = bary(b);
                let x = p[0] * b[0] + p[1] * b[1] + p[2] * b[2];
                let e = b[0] * h_f[i][v[0]] + b[1] * h_f[i][v[1]] + b[2] * h_f[i][v[2]] - exact.fracture_value(f, x);
                let g = grad_h - exact.fracture_gradient(f, x);
                l2_f = l2_f + T::lit(w) * geo.area * e * e;
                h1_f = h1_f + T::lit(w) * geo.area * g.dot(g);
            }
        }
    }
    ErrorNorms {
        l2_d: l2_d.sqrt(),
        h1_d: h1_d.sqrt(),
        l2_f: l2_f.sqrt(),
        h1_f: h1_f.sqrt(),
    }
}
