//! Element-level integrals, in unreduced node numbering.
//!
//! Row and column indices here refer to mesh vertices (all of them, Dirichlet nodes
//! included); `q` and `u` columns use the global [`crate::mesh::DofLayout`] offsets.

use rayon::prelude::*;

use super::discretization::Discretization;
use crate::geometry::{BoundaryCondition, Vec2};
use crate::intersection::{tri_tri_overlap, OverlapTable};
use crate::quadrature::{bary, SEG_GAUSS2, TET_DEG2, TRI_DEG2};
use crate::sparse::TripletBuilder;
use crate::Scalar;

pub type Triplets<T> = Vec<(usize, usize, T)>;

/// Values of the four tet basis functions at a point of an interface triangle.
fn tet_basis<T: Scalar>(disc: &Discretization<T>, i: usize, k: usize, p: Vec2<T>) -> ([usize; 4], [T; 4]) {
    let tet = disc.interfaces[i].parent_tet[k];
    let x = disc.network.fractures[i].frame.from_local(p);
    (disc.tet_mesh.tets[tet], disc.tet_mesh.barycentric(tet, x))
}

fn tri_basis<T: Scalar>(disc: &Discretization<T>, i: usize, t: usize, p: Vec2<T>) -> ([usize; 3], [T; 3]) {
    let m = &disc.h_meshes[i];
    (m.tris[t], m.barycentric(t, p))
}

/// P1 stiffness of the porous matrix and the load vector `∫ f φ + ∫_{Γ_N} g φ`.
pub fn matrix_stiffness<T: Scalar>(disc: &Discretization<T>) -> (TripletBuilder<T>, Vec<T>) {
    let mesh = &disc.tet_mesh;
    let domain = &disc.network.domain;
    let n = mesh.n_vertices();
    let chunks: Vec<(Triplets<T>, Vec<(usize, T)>)> = (0..mesh.n_tets())
        .into_par_iter()
        .chunks(4096)
        .map(|ts| {
            let mut trip = Vec::with_capacity(16 * ts.len());
            let mut load = Vec::new();
            for t in ts {
                let g = mesh.geometry(t);
                let v = mesh.tets[t];
                let kg = g.grads.map(|x| domain.permeability.apply(x));
                for a in 0..4 {
                    for b in 0..4 {
                        trip.push((v[a], v[b], g.volume * kg[a].dot(g.grads[b])));
                    }
                }
                if !domain.source.is_zero() {
                    let p = mesh.points(t);
                    for (l, w) in TET_DEG2 {
                        let l: [T; 4] = bary(l);
                        let x = p[0] * l[0] + p[1] * l[1] + p[2] * l[2] + p[3] * l[3];
                        let fw = domain.source.eval(x) * T::lit(w) * g.volume;
                        for a in 0..4 {
                            load.push((v[a], fw * l[a]));
                        }
                    }
                }
            }
            (trip, load)
        })
        .collect();
    let mut builder = TripletBuilder::new(n, n);
    let mut rhs = vec![T::zero(); n];
    for (trip, load) in chunks {
        for (i, j, v) in trip {
            builder.push(i, j, v);
        }
        for (i, v) in load {
            rhs[i] = rhs[i] + v;
        }
    }
    for bf in &mesh.boundary_faces {
        let BoundaryCondition::Neumann(g) = domain.bc(bf.face) else {
            continue;
        };
        if g.is_zero() {
            continue;
        }
        let local = crate::mesh::TET_FACES[bf.local];
        let v = local.map(|l| mesh.tets[bf.tet][l]);
        let p = v.map(|k| mesh.vertices[k]);
        let area = (p[1] - p[0]).cross(p[2] - p[0]).norm() * T::lit(0.5);
        for (l, w) in TRI_DEG2 {
            let l: [T; 3] = bary(l);
            let x = p[0] * l[0] + p[1] * l[1] + p[2] * l[2];
            let gw = g.eval(x) * T::lit(w) * area;
            for a in 0..3 {
                rhs[v[a]] = rhs[v[a]] + gw * l[a];
            }
        }
    }
    (builder, rhs)
}

/// `G_D^i`: mass of 3D basis functions restricted to fracture `i`, integrated on the
/// interface mesh.
pub fn interface_mass<T: Scalar>(disc: &Discretization<T>, i: usize) -> Triplets<T> {
    let im = &disc.interfaces[i];
    let mut out = Vec::with_capacity(16 * im.n_triangles());
    for k in 0..im.n_triangles() {
        let [a, b, c] = im.triangles[k];
        let area = im.triangle_area(k);
        let mut local = [[T::zero(); 4]; 4];
        let mut nodes = [0; 4];
        for (l, w) in TRI_DEG2 {
            let l: [T; 3] = bary(l);
            let (v, phi) = tet_basis(disc, i, k, a * l[0] + b * l[1] + c * l[2]);
            nodes = v;
            let wa = T::lit(w) * area;
            for r in 0..4 {
                for s in 0..4 {
                    local[r][s] = local[r][s] + wa * phi[r] * phi[s];
                }
            }
        }
        for r in 0..4 {
            for s in 0..4 {
                out.push((nodes[r], nodes[s], local[r][s]));
            }
        }
    }
    out
}

/// Overlap of the interface triangles of fracture `i` with its `h` mesh.
pub fn interface_h_overlap<T: Scalar>(disc: &Discretization<T>, i: usize) -> OverlapTable<T> {
    let im = &disc.interfaces[i];
    let a: Vec<_> = (0..im.n_triangles()).map(|k| im.triangle_polygon(k)).collect();
    let hm = &disc.h_meshes[i];
    let b: Vec<_> = (0..hm.n_tris()).map(|t| hm.polygon(t)).collect();
    tri_tri_overlap(&a, &b, disc.network.eps())
}

/// `G_DF^i` with rows indexed by tet vertices and columns by vertices of fracture `i`.
pub fn matrix_fracture_cross<T: Scalar>(disc: &Discretization<T>, i: usize) -> Triplets<T> {
    let table = interface_h_overlap(disc, i);
    let mut out = Vec::with_capacity(12 * table.len());
    for e in &table.entries {
        let mut local = [[T::zero(); 3]; 4];
        let mut rows = [0; 4];
        let mut cols = [0; 3];
        for (&p, &w) in e.points.iter().zip(&e.weights) {
            let (v, phi) = tet_basis(disc, i, e.a, p);
            let (u, psi) = tri_basis(disc, i, e.b, p);
            rows = v;
            cols = u;
            for r in 0..4 {
                for s in 0..3 {
                    local[r][s] = local[r][s] + w * phi[r] * psi[s];
                }
            }
        }
        for r in 0..4 {
            for s in 0..3 {
                out.push((rows[r], cols[s], local[r][s]));
            }
        }
    }
    out
}

/// P1 stiffness on fracture `i` and its load `∫ f_i ψ + ∫_{γ_N} g ψ`.
pub fn fracture_stiffness<T: Scalar>(disc: &Discretization<T>, i: usize) -> (Triplets<T>, Vec<T>) {
    let m = &disc.h_meshes[i];
    let f = &disc.network.fractures[i];
    let mut out = Vec::with_capacity(9 * m.n_tris());
    let mut rhs = vec![T::zero(); m.n_vertices()];
    for t in 0..m.n_tris() {
        let g = m.geometry(t);
        let v = m.tris[t];
        let kg = g.grads.map(|x| f.permeability.apply(x));
        for a in 0..3 {
            for b in 0..3 {
                out.push((v[a], v[b], g.area * kg[a].dot(g.grads[b])));
            }
        }
        if !f.source.is_zero() {
            let p = m.points(t);
            for (l, w) in TRI_DEG2 {
                let l: [T; 3] = bary(l);
                let x = f.frame.from_local(p[0] * l[0] + p[1] * l[1] + p[2] * l[2]);
                let sw = f.source.eval(x) * T::lit(w) * g.area;
                for a in 0..3 {
                    rhs[v[a]] = rhs[v[a]] + sw * l[a];
                }
            }
        }
    }
    for be in &m.boundary_edges {
        let BoundaryCondition::Neumann(g) = &f.edge_bc[be.edge] else {
            continue;
        };
        if g.is_zero() {
            continue;
        }
        let tri = m.tris[be.tri];
        let (va, vb) = (tri[(be.local + 1) % 3], tri[(be.local + 2) % 3]);
        let (pa, pb) = (m.vertices[va], m.vertices[vb]);
        let len = (pb - pa).norm();
        for (s, w) in SEG_GAUSS2 {
            let s = T::lit(s);
            let x = f.frame.from_local(pa + (pb - pa) * s);
            let gw = g.eval(x) * T::lit(w) * len;
            rhs[va] = rhs[va] + gw * (T::one() - s);
            rhs[vb] = rhs[vb] + gw * s;
        }
    }
    (out, rhs)
}

/// `G_F^i`: P1 mass matrix of the fracture mesh.
pub fn fracture_mass<T: Scalar>(disc: &Discretization<T>, i: usize) -> Triplets<T> {
    let m = &disc.h_meshes[i];
    let mut out = Vec::with_capacity(9 * m.n_tris());
    for t in 0..m.n_tris() {
        let area = m.area(t);
        let v = m.tris[t];
        for a in 0..3 {
            for b in 0..3 {
                let f = if a == b { T::lit(2.0) } else { T::one() };
                out.push((v[a], v[b], area * f / T::lit(12.0)));
            }
        }
    }
    out
}

/// Integrals over one trace `S_m` with fracture pair `(i, j)`, `i < j` (sides 0 and 1).
#[derive(Clone, Debug, Default)]
pub struct TraceBlocks<T> {
    /// `G^m_{st}` with rows in fracture `s` vertices and columns in fracture `t` vertices.
    pub g: [[Triplets<T>; 2]; 2],
    /// Rows of `B^+` for side `s` (fracture vertices) against global `u` columns.
    pub b_plus: [Triplets<T>; 2],
    /// Rows of `B` for side `s` (own multiplier only).
    pub b: [Triplets<T>; 2],
    /// `C` block of `u^m`, global `u` indices.
    pub c: Triplets<T>,
}

pub fn trace_blocks<T: Scalar>(disc: &Discretization<T>, m: usize) -> TraceBlocks<T> {
    let cp = &disc.couplings[m];
    let (fi, fj) = disc.network.traces[m].fractures;
    let frac = [fi, fj];
    let layout = &disc.layout;
    let u_col = |s: usize, e: usize| layout.uim_offset(m, frac[s]) + e;
    let mut out = TraceBlocks::default();
    for piece in &cp.pieces {
        for (t, w) in cp.rule(piece) {
            let basis: [Option<([usize; 3], [T; 3])>; 2] =
                [0, 1].map(|s| piece.cell[s].map(|c| tri_basis(disc, frac[s], c, cp.local_point(s, t))));
            for s in 0..2 {
                let Some((vs, ps)) = basis[s] else { continue };
                for r in 0..2 {
                    if let Some((vr, pr)) = basis[r] {
                        for a in 0..3 {
                            for b in 0..3 {
                                out.g[s][r].push((vs[a], vr[b], w * ps[a] * pr[b]));
                            }
                        }
                    }
                    for a in 0..3 {
                        out.b_plus[s].push((vs[a], u_col(r, piece.seg[r]), w * ps[a]));
                    }
                }
                for a in 0..3 {
                    out.b[s].push((vs[a], u_col(s, piece.seg[s]), w * ps[a]));
                }
            }
            for s in 0..2 {
                for r in 0..2 {
                    out.c.push((u_col(s, piece.seg[s]), u_col(r, piece.seg[r]), w));
                }
            }
        }
    }
    out
}

/// `D_i`: rows are vertices of fracture `i`, columns global `q` indices.
pub fn fracture_q_coupling<T: Scalar>(disc: &Discretization<T>, i: usize) -> Triplets<T> {
    let qm = &disc.q_meshes[i];
    let hm = &disc.h_meshes[i];
    let a: Vec<_> = (0..qm.n_tris()).map(|t| qm.polygon(t)).collect();
    let b: Vec<_> = (0..hm.n_tris()).map(|t| hm.polygon(t)).collect();
    let table = tri_tri_overlap(&a, &b, disc.network.eps());
    let off = disc.layout.q_offset(i);
    let mut out = Vec::with_capacity(3 * table.len());
    for e in &table.entries {
        let mut acc = [T::zero(); 3];
        let mut nodes = [0; 3];
        for (&p, &w) in e.points.iter().zip(&e.weights) {
            let (v, psi) = tri_basis(disc, i, e.b, p);
            nodes = v;
            for s in 0..3 {
                acc[s] = acc[s] + w * psi[s];
            }
        }
        for s in 0..3 {
            out.push((nodes[s], off + e.a, acc[s]));
        }
    }
    out
}

/// `E_i`: rows are tet vertices, columns global `q` indices.
pub fn matrix_q_coupling<T: Scalar>(disc: &Discretization<T>, i: usize) -> Triplets<T> {
    let qm = &disc.q_meshes[i];
    let im = &disc.interfaces[i];
    let a: Vec<_> = (0..qm.n_tris()).map(|t| qm.polygon(t)).collect();
    let b: Vec<_> = (0..im.n_triangles()).map(|k| im.triangle_polygon(k)).collect();
    let table = tri_tri_overlap(&a, &b, disc.network.eps());
    let off = disc.layout.q_offset(i);
    let mut out = Vec::with_capacity(4 * table.len());
    for e in &table.entries {
        let mut acc = [T::zero(); 4];
        let mut nodes = [0; 4];
        for (&p, &w) in e.points.iter().zip(&e.weights) {
            let (v, phi) = tet_basis(disc, i, e.b, p);
            nodes = v;
            for s in 0..4 {
                acc[s] = acc[s] + w * phi[s];
            }
        }
        for s in 0..4 {
            out.push((nodes[s], off + e.a, acc[s]));
        }
    }
    out
}
