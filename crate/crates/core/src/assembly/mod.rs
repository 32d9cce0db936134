//! Assembly of the discrete operators and right-hand sides.

mod discretization;
pub mod operators;

use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use discretization::{Discretization, MeshSizes};

use crate::error::{Error, Result};
use crate::mesh::DofLayout;
use crate::sparse::{CsrMatrix, TripletBuilder};
use crate::Scalar;

/// Matrices of the constrained problem, restricted to free (non-Dirichlet) nodes.
///
/// With `h = [h_D; h_F]` and `w = [q; u]` the problem reads
///
/// ```text
/// min  hᵀ G h + wᵀ 𝒞 w + 2 hᵀ ℬ⁺ w + 2 l_hᵀ h + 2 l_wᵀ w + c0
/// s.t. A_D h_D − E q = b_D
///      A_F h_F − β G_DFᵀ h_D − B u + D q = b_F
/// ```
///
/// where `ℬ⁺ = [[0, 0], [0, −α B⁺]]`, and `l_h`, `l_w`, `c0` come from lifting the
/// Dirichlet data into the functional.
#[derive(Clone, Debug)]
pub struct SystemBlocks<T> {
    pub layout: DofLayout,
    pub alpha: T,
    pub beta: T,
    pub a_d: CsrMatrix<T>,
    /// Diagonal blocks `A_i` of `A_F`.
    pub a_f: Vec<CsrMatrix<T>>,
    /// `G_DF^F`, `n_hD x n_hF`.
    pub g_df: CsrMatrix<T>,
    /// Functional matrix `G`, `n_h x n_h`.
    pub g: CsrMatrix<T>,
    pub b: CsrMatrix<T>,
    pub b_plus: CsrMatrix<T>,
    pub c: CsrMatrix<T>,
    pub d: CsrMatrix<T>,
    pub e: CsrMatrix<T>,
    pub b_d: Vec<T>,
    pub b_f: Vec<T>,
    pub l_h: Vec<T>,
    pub l_w: Vec<T>,
    pub c0: T,
    pub full: FullOperators<T>,
    pub assembly_time: Duration,
}

/// Functional operators on all nodes (Dirichlet ones included), for evaluating `𝒥`
/// on complete fields.
#[derive(Clone, Debug)]
pub struct FullOperators<T> {
    pub g: CsrMatrix<T>,
    pub b_plus: CsrMatrix<T>,
    /// Reduced index of each full `h` entry, `None` at Dirichlet nodes.
    pub h_map: Vec<Option<usize>>,
    /// Dirichlet values on full `h` (zero at free nodes).
    pub h_fixed: Vec<T>,
    pub n_hd: usize,
    /// Offsets of each fracture's vertices inside full `h_F`.
    pub hf_offsets: Vec<usize>,
}

impl<T: Scalar> FullOperators<T> {
    pub fn n_h(&self) -> usize {
        self.h_map.len()
    }

    /// Full `h` from reduced values plus Dirichlet data.
    pub fn expand(&self, h: &[T]) -> Vec<T> {
        self.h_map
            .iter()
            .zip(&self.h_fixed)
            .map(|(m, &g)| m.map_or(g, |k| h[k]))
            .collect()
    }
}

impl<T: Scalar> SystemBlocks<T> {
    pub fn n_hd(&self) -> usize {
        self.layout.n_hd
    }

    pub fn n_hf(&self) -> usize {
        self.layout.n_hf()
    }

    pub fn n_q(&self) -> usize {
        self.layout.n_q()
    }

    pub fn n_w(&self) -> usize {
        self.layout.n_w()
    }

    /// Right-hand side `b = [b_D; b_F]` of the constraints.
    pub fn rhs(&self) -> Vec<T> {
        self.b_d.iter().chain(&self.b_f).copied().collect()
    }

    /// `A_F` as one block-diagonal matrix.
    pub fn a_f_matrix(&self) -> CsrMatrix<T> {
        let n = self.n_hf();
        let mut t = TripletBuilder::new(n, n);
        for (i, a) in self.a_f.iter().enumerate() {
            let o = self.layout.hf_offset(i);
            for (r, c, v) in a.triplets() {
                t.push(o + r, o + c, v);
            }
        }
        t.build()
    }

    /// `𝒥` on reduced unknowns, including the Dirichlet lifting terms.
    pub fn functional(&self, h: &[T], w: &[T]) -> T {
        let u = &w[self.n_q()..];
        let hf = &h[self.n_hd()..];
        let two = T::lit(2.0);
        self.g.quad_form(h) + self.c.quad_form(u) - two * self.alpha * self.b_plus.bilinear(hf, u)
            + two * crate::scalar::dot(&self.l_h, h)
            + two * crate::scalar::dot(&self.l_w, w)
            + self.c0
    }
}

/// Checks that `A_D` and every `A_i` are nonsingular for the given parameters.
pub fn check_stability<T: Scalar>(disc: &Discretization<T>, alpha: T, beta: T) -> Result<()> {
    if alpha < T::zero() || beta < T::zero() {
        return Err(Error::InvalidParameter(format!(
            "alpha ({alpha}) and beta ({beta}) must be non-negative"
        )));
    }
    if beta == T::zero() && !disc.network.domain.has_dirichlet() {
        return Err(Error::SingularOperator(
            "porous matrix has no Dirichlet boundary and beta = 0".into(),
        ));
    }
    for (i, f) in disc.network.fractures.iter().enumerate() {
        let has_traces = !disc.layout.traces_of[i].is_empty();
        if !f.has_dirichlet() && !(alpha > T::zero() && has_traces) {
            return Err(Error::SingularOperator(format!(
                "fracture {i} has neither Dirichlet edges nor alpha-weighted traces"
            )));
        }
    }
    Ok(())
}

/// Assembles every operator of the level.
pub fn assemble_system<T: Scalar>(disc: &Discretization<T>, alpha: T, beta: T) -> Result<SystemBlocks<T>> {
    check_stability(disc, alpha, beta)?;
    let start = Instant::now();
    let layout = disc.layout.clone();
    let nf = disc.n_fractures();
    let n_d = disc.tet_mesh.n_vertices();
    let hf_off = disc.hf_full_offsets();
    let n_f = *hf_off.last().unwrap();
    let n_h = n_d + n_f;
    let n_u = layout.n_u();
    let n_q = layout.n_q();
    let one = T::one();
    let a2 = alpha * alpha;

    // Per-fracture blocks in parallel.
    struct FractureParts<T> {
        g_d: Vec<(usize, usize, T)>,
        g_df: Vec<(usize, usize, T)>,
        g_f: Vec<(usize, usize, T)>,
        k_f: Vec<(usize, usize, T)>,
        rhs_f: Vec<T>,
        d: Vec<(usize, usize, T)>,
        e: Vec<(usize, usize, T)>,
    }
    let parts: Vec<FractureParts<T>> = (0..nf)
        .into_par_iter()
        .map(|i| {
            let (k_f, rhs_f) = operators::fracture_stiffness(disc, i);
            FractureParts {
                g_d: operators::interface_mass(disc, i),
                g_df: operators::matrix_fracture_cross(disc, i),
                g_f: operators::fracture_mass(disc, i),
                k_f,
                rhs_f,
                d: operators::fracture_q_coupling(disc, i),
                e: operators::matrix_q_coupling(disc, i),
            }
        })
        .collect();
    let traces: Vec<operators::TraceBlocks<T>> = (0..layout.n_traces())
        .into_par_iter()
        .map(|m| operators::trace_blocks(disc, m))
        .collect();
    let (k_d, rhs_d) = operators::matrix_stiffness(disc);

    // Full operators.
    let mut a_d_full = k_d;
    let mut g_full = TripletBuilder::new(n_h, n_h);
    let mut g_df_full = TripletBuilder::new(n_d, n_f);
    let mut a_f_full = TripletBuilder::new(n_f, n_f);
    let mut b_full = TripletBuilder::new(n_f, n_u);
    let mut bp_full = TripletBuilder::new(n_f, n_u);
    let mut c_full = TripletBuilder::new(n_u, n_u);
    let mut d_full = TripletBuilder::new(n_f, n_q);
    let mut e_full = TripletBuilder::new(n_d, n_q);
    let mut rhs_f = vec![T::zero(); n_f];
    for (i, p) in parts.iter().enumerate() {
        let o = hf_off[i];
        for &(r, c, v) in &p.g_d {
            g_full.push(r, c, v);
            if beta > T::zero() {
                a_d_full.push(r, c, beta * v);
            }
        }
        for &(r, c, v) in &p.g_df {
            g_df_full.push(r, o + c, v);
            g_full.push(r, n_d + o + c, -v);
            g_full.push(n_d + o + c, r, -v);
        }
        for &(r, c, v) in &p.g_f {
            g_full.push(n_d + o + r, n_d + o + c, v);
        }
        for &(r, c, v) in &p.k_f {
            a_f_full.push(o + r, o + c, v);
        }
        for (k, &v) in p.rhs_f.iter().enumerate() {
            rhs_f[o + k] = v;
        }
        for &(r, c, v) in &p.d {
            d_full.push(o + r, c, v);
        }
        for &(r, c, v) in &p.e {
            e_full.push(r, c, v);
        }
    }
    for (m, tb) in traces.iter().enumerate() {
        let (fi, fj) = layout.pairs[m];
        let off = [hf_off[fi], hf_off[fj]];
        for s in 0..2 {
            for r in 0..2 {
                let factor = if s == r { one + a2 } else { a2 - one };
                for &(a, b, v) in &tb.g[s][r] {
                    g_full.push(n_d + off[s] + a, n_d + off[r] + b, factor * v);
                    if s == r && alpha > T::zero() {
                        a_f_full.push(off[s] + a, off[s] + b, alpha * v);
                    }
                }
            }
            for &(a, col, v) in &tb.b_plus[s] {
                bp_full.push(off[s] + a, col, v);
            }
            for &(a, col, v) in &tb.b[s] {
                b_full.push(off[s] + a, col, v);
            }
        }
        for &(r, c, v) in &tb.c {
            c_full.push(r, c, v);
        }
    }
    let a_d_full = a_d_full.build();
    let g_full = g_full.build();
    let g_df_full = g_df_full.build();
    let a_f_full = a_f_full.build();
    let bp_full = bp_full.build();

    // Reduction to free nodes.
    let d_map: Vec<Option<usize>> = disc.hd_dofs.free.clone();
    let mut f_map: Vec<Option<usize>> = Vec::with_capacity(n_f);
    for (i, dofs) in disc.hf_dofs.iter().enumerate() {
        let o = layout.hf_offset(i);
        f_map.extend(dofs.free.iter().map(|x| x.map(|k| o + k)));
    }
    let h_map: Vec<Option<usize>> = d_map
        .iter()
        .copied()
        .chain(f_map.iter().map(|x| x.map(|k| layout.n_hd + k)))
        .collect();
    let g_d: Vec<T> = disc.hd_dofs.fixed.clone();
    let g_f: Vec<T> = disc.hf_dofs.iter().flat_map(|d| d.fixed.iter().copied()).collect();
    let h_fixed: Vec<T> = g_d.iter().chain(&g_f).copied().collect();
    let all_u: Vec<Option<usize>> = (0..n_u).map(Some).collect();
    let all_q: Vec<Option<usize>> = (0..n_q).map(Some).collect();
    let (n_hd, n_hf) = (layout.n_hd, layout.n_hf());
    let restrict_vec = |map: &[Option<usize>], n: usize, full: &[T]| {
        let mut out = vec![T::zero(); n];
        for (m, &v) in map.iter().zip(full) {
            if let Some(k) = m {
                out[*k] = v;
            }
        }
        out
    };

    let a_d = a_d_full.restrict(&d_map, n_hd, &d_map, n_hd);
    let a_f_red = a_f_full.restrict(&f_map, n_hf, &f_map, n_hf);
    let a_f: Vec<CsrMatrix<T>> = (0..nf)
        .map(|i| {
            let o = layout.hf_offset(i);
            let n = layout.n_hi[i];
            let map: Vec<Option<usize>> = (0..n_hf).map(|k| (k >= o && k < o + n).then(|| k - o)).collect();
            a_f_red.restrict(&map, n, &map, n)
        })
        .collect();

    // b_D = rhs_D − A_D(:, fixed) g_D
    let ag = a_d_full.mul_vec(&g_d);
    let b_d_full: Vec<T> = rhs_d.iter().zip(&ag).map(|(&r, &a)| r - a).collect();
    let b_d = restrict_vec(&d_map, n_hd, &b_d_full);
    // b_F = rhs_F − A_F(:, fixed) g_F + β G_DFᵀ g_D
    let afg = a_f_full.mul_vec(&g_f);
    let gdf_t_g = g_df_full.mul_vec_t(&g_d);
    let b_f_full: Vec<T> = (0..n_f).map(|k| rhs_f[k] - afg[k] + beta * gdf_t_g[k]).collect();
    let b_f = restrict_vec(&f_map, n_hf, &b_f_full);

    let gg = g_full.mul_vec(&h_fixed);
    let l_h = restrict_vec(&h_map, layout.n_h(), &gg);
    let c0 = crate::scalar::dot(&h_fixed, &gg);
    let bpg = bp_full.mul_vec_t(&g_f);
    let mut l_w = vec![T::zero(); n_q + n_u];
    for (k, v) in bpg.into_iter().enumerate() {
        l_w[n_q + k] = -alpha * v;
    }

    let blocks = SystemBlocks {
        a_d,
        a_f,
        g_df: g_df_full.restrict(&d_map, n_hd, &f_map, n_hf),
        g: g_full.restrict(&h_map, layout.n_h(), &h_map, layout.n_h()),
        b: b_full.build().restrict(&f_map, n_hf, &all_u, n_u),
        b_plus: bp_full.restrict(&f_map, n_hf, &all_u, n_u),
        c: c_full.build(),
        d: d_full.build().restrict(&f_map, n_hf, &all_q, n_q),
        e: e_full.build().restrict(&d_map, n_hd, &all_q, n_q),
        b_d,
        b_f,
        l_h,
        l_w,
        c0,
        full: FullOperators {
            g: g_full,
            b_plus: bp_full,
            h_map,
            h_fixed,
            n_hd: n_d,
            hf_offsets: hf_off,
        },
        assembly_time: start.elapsed(),
        layout,
        alpha,
        beta,
    };
    Ok(blocks)
}
