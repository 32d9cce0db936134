//! Common refinement of the partitions induced on a trace by the two fracture meshes
//! and the two trace meshes.

use super::overlap::{segment_cover, CellGrid};
use crate::geometry::{ConvexPolygon2, Segment2, Trace, Vec2};
use crate::mesh::SegMesh;
use crate::quadrature::SEG_GAUSS2;
use crate::Scalar;

/// Interval `[t0, t1]` of the trace parameter on which every partition is a single cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePiece<T> {
    pub t0: T,
    pub t1: T,
    /// Fracture mesh triangle on each side, `None` where that mesh leaves a gap.
    pub cell: [Option<usize>; 2],
    /// Trace mesh element on each side.
    pub seg: [usize; 2],
}

#[derive(Clone, Debug)]
pub struct TraceCoupling<T> {
    pub trace: usize,
    pub length: T,
    /// Trace endpoints in the local frame of each fracture.
    pub local: [[Vec2<T>; 2]; 2],
    pub pieces: Vec<TracePiece<T>>,
}

impl<T: Scalar> TraceCoupling<T> {
    /// Point at parameter `t` in fracture side `s`'s frame.
    pub fn local_point(&self, s: usize, t: T) -> Vec2<T> {
        let [a, b] = self.local[s];
        a + (b - a) * t
    }

    /// Two-point Gauss rule on a piece: `(t, weight)` with weights in arc length.
    pub fn rule(&self, piece: &TracePiece<T>) -> [(T, T); 2] {
        let h = piece.t1 - piece.t0;
        SEG_GAUSS2.map(|(x, w)| (piece.t0 + h * T::lit(x), T::lit(w) * h * self.length))
    }
}

/// Builds the common refinement for one trace. `cells[s]`/`grids[s]` are the fracture
/// mesh triangles of side `s` (fracture `trace.fractures.0` for `s = 0`).
pub fn trace_coupling<T: Scalar>(
    trace: &Trace<T>,
    local: [[Vec2<T>; 2]; 2],
    cells: [&[ConvexPolygon2<T>]; 2],
    grids: [&CellGrid; 2],
    segs: [&SegMesh<T>; 2],
    eps: T,
) -> TraceCoupling<T> {
    let length = trace.length();
    let covers: [Vec<(usize, T, T)>; 2] = [0, 1].map(|s| {
        let seg = Segment2::new(local[s][0], local[s][1]);
        segment_cover(cells[s], grids[s], &seg, eps)
    });
    let mut breaks: Vec<T> = vec![T::zero(), T::one()];
    for c in &covers {
        breaks.extend(c.iter().flat_map(|&(_, a, b)| [a, b]));
    }
    for s in segs {
        breaks.extend(s.breaks.iter().copied());
    }
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    breaks.dedup_by(|x, y| (*x - *y) * length <= eps);
    let find = |cover: &[(usize, T, T)], t: T| {
        let k = cover.partition_point(|&(_, _, b)| b < t);
        cover.get(k).filter(|&&(_, a, b)| a <= t && t <= b).map(|&(c, _, _)| c)
    };
    let pieces = breaks
        .windows(2)
        .map(|w| {
            let mid = (w[0] + w[1]) * T::lit(0.5);
            TracePiece {
                t0: w[0],
                t1: w[1],
                cell: [find(&covers[0], mid), find(&covers[1], mid)],
                seg: [segs[0].locate(mid), segs[1].locate(mid)],
            }
        })
        .collect();
    TraceCoupling {
        trace: trace.id,
        length,
        local,
        pieces,
    }
}
