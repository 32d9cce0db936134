//! The mismatch functional evaluated on complete fields.

use crate::assembly::{operators, Discretization, SystemBlocks};
use crate::Scalar;

/// `𝒥` through the assembled operators on complete fields: `h_d` on all tet vertices,
/// `h_f[i]` on all vertices of fracture `i`, `u` the multipliers.
pub fn evaluate_functional<T: Scalar>(blocks: &SystemBlocks<T>, h_d: &[T], h_f: &[Vec<T>], u: &[T]) -> T {
    let h: Vec<T> = h_d.iter().chain(h_f.iter().flatten()).copied().collect();
    let hf = &h[blocks.full.n_hd..];
    blocks.full.g.quad_form(&h) + blocks.c.quad_form(u)
        - T::lit(2.0) * blocks.alpha * blocks.full.b_plus.bilinear(hf, u)
}

/// `𝒥` by direct quadrature of its defining integrals on the overlap pieces.
pub fn functional_by_quadrature<T: Scalar>(
    disc: &Discretization<T>,
    alpha: T,
    h_d: &[T],
    h_f: &[Vec<T>],
    u: &[T],
) -> T {
    let mut total = T::zero();
    for (i, f) in disc.network.fractures.iter().enumerate() {
        let im = &disc.interfaces[i];
        let hm = &disc.h_meshes[i];
        let table = operators::interface_h_overlap(disc, i);
        for e in &table.entries {
            let tet = im.parent_tet[e.a];
            for (&p, &w) in e.points.iter().zip(&e.weights) {
                let hd = disc.tet_mesh.interpolate(tet, h_d, f.frame.from_local(p));
                let hi = hm.interpolate(e.b, &h_f[i], p);
                total = total + w * (hd - hi) * (hd - hi);
            }
        }
    }
    for (m, cp) in disc.couplings.iter().enumerate() {
        let (fi, fj) = disc.network.traces[m].fractures;
        let frac = [fi, fj];
        for piece in &cp.pieces {
            for (t, w) in cp.rule(piece) {
                let h = [0, 1].map(|s| {
                    piece.cell[s].map_or(T::zero(), |c| {
                        disc.h_meshes[frac[s]].interpolate(c, &h_f[frac[s]], cp.local_point(s, t))
                    })
                });
                let uu = [0, 1].map(|s| u[disc.layout.uim_offset(m, frac[s]) + piece.seg[s]]);
                let jump = h[0] - h[1];
                let mix = uu[0] + uu[1] - alpha * (h[0] + h[1]);
                total = total + w * (jump * jump + mix * mix);
            }
        }
    }
    total
}
