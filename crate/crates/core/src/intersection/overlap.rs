//! Intersections between two cell families on one fracture, with quadrature rules.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::geometry::{clip_segment_params, ConvexPolygon2, Segment2, Vec2};
use crate::quadrature::{bary, SEG_GAUSS2, TRI_DEG2};
use crate::Scalar;

/// One intersecting pair `(a, b)` with a degree-2 rule on `a ∩ b`.
#[derive(Clone, Debug)]
pub struct OverlapEntry<T> {
    pub a: usize,
    pub b: usize,
    pub measure: T,
    pub points: Vec<Vec2<T>>,
    pub weights: Vec<T>,
}

#[derive(Clone, Debug, Default)]
pub struct OverlapTable<T> {
    pub entries: Vec<OverlapEntry<T>>,
}

impl<T: Scalar> OverlapTable<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_measure(&self) -> T {
        self.entries.iter().map(|e| e.measure).sum()
    }

    /// Integral of `f` over the union of all intersections.
    pub fn integrate(&self, f: impl Fn(Vec2<T>) -> T) -> T {
        self.entries
            .iter()
            .flat_map(|e| e.points.iter().zip(&e.weights))
            .map(|(&p, &w)| w * f(p))
            .sum()
    }
}

/// Degree-2 rule on a convex polygon: three points per fan triangle.
pub fn polygon_rule<T: Scalar>(poly: &ConvexPolygon2<T>) -> (Vec<Vec2<T>>, Vec<T>) {
    let mut pts = Vec::with_capacity(3 * poly.len());
    let mut wts = Vec::with_capacity(3 * poly.len());
    for [a, b, c] in poly.fan() {
        let area = (b - a).cross(c - a) * T::lit(0.5);
        for (l, w) in TRI_DEG2 {
            let l: [T; 3] = bary(l);
            pts.push(a * l[0] + b * l[1] + c * l[2]);
            wts.push(T::lit(w) * area);
        }
    }
    (pts, wts)
}

/// Uniform hash grid over cell bounding boxes.
pub struct CellGrid {
    origin: [f64; 2],
    size: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl CellGrid {
    pub fn new<T: Scalar>(cells: &[ConvexPolygon2<T>]) -> Self {
        let mut size: f64 = 0.0;
        let mut origin = [f64::INFINITY; 2];
        for c in cells {
            let (lo, hi) = c.bbox();
            size = size.max((hi.x - lo.x).as_f64()).max((hi.y - lo.y).as_f64());
            origin[0] = origin[0].min(lo.x.as_f64());
            origin[1] = origin[1].min(lo.y.as_f64());
        }
        let mut grid = Self {
            origin,
            size: if size > 0.0 { size } else { 1.0 },
            buckets: HashMap::new(),
        };
        for (k, c) in cells.iter().enumerate() {
            let (lo, hi) = c.bbox();
            for key in grid.keys(lo, hi) {
                grid.buckets.entry(key).or_default().push(k);
            }
        }
        grid
    }

    fn keys<T: Scalar>(&self, lo: Vec2<T>, hi: Vec2<T>) -> impl Iterator<Item = (i64, i64)> {
        let f = |v: T, o: f64| ((v.as_f64() - o) / self.size).floor() as i64;
        let (x0, x1) = (f(lo.x, self.origin[0]), f(hi.x, self.origin[0]));
        let (y0, y1) = (f(lo.y, self.origin[1]), f(hi.y, self.origin[1]));
        (x0..=x1).flat_map(move |x| (y0..=y1).map(move |y| (x, y)))
    }

    /// Sorted, deduplicated cells whose bucket overlaps the box `[lo, hi]`.
    pub fn candidates<T: Scalar>(&self, lo: Vec2<T>, hi: Vec2<T>) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .keys(lo, hi)
            .filter_map(|k| self.buckets.get(&k))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// All pairs of cells from `a` and `b` whose intersection has positive area.
pub fn tri_tri_overlap<T: Scalar>(a: &[ConvexPolygon2<T>], b: &[ConvexPolygon2<T>], eps: T) -> OverlapTable<T> {
    let grid = CellGrid::new(b);
    let entries = a
        .par_iter()
        .enumerate()
        .flat_map_iter(|(ia, pa)| {
            let (lo, hi) = pa.bbox();
            let slack = Vec2::new(eps, eps);
            grid.candidates(lo - slack, hi + slack)
                .into_iter()
                .filter_map(|ib| {
                    let poly = pa.intersect(&b[ib], eps)?;
                    let (points, weights) = polygon_rule(&poly);
                    Some(OverlapEntry {
                        a: ia,
                        b: ib,
                        measure: poly.area(),
                        points,
                        weights,
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    OverlapTable { entries }
}

/// Pieces of `seg` inside the cells, as parameter intervals `(cell, t0, t1)`.
///
/// Parts of the segment covered by several cells (a segment running along a shared
/// edge) are assigned to the lowest-numbered cell so every point is counted once.
pub fn segment_cover<T: Scalar>(
    cells: &[ConvexPolygon2<T>],
    grid: &CellGrid,
    seg: &Segment2<T>,
    eps: T,
) -> Vec<(usize, T, T)> {
    let lo = Vec2::new(seg.a.x.min(seg.b.x), seg.a.y.min(seg.b.y)) - Vec2::new(eps, eps);
    let hi = Vec2::new(seg.a.x.max(seg.b.x), seg.a.y.max(seg.b.y)) + Vec2::new(eps, eps);
    let hits: Vec<(usize, T, T)> = grid
        .candidates(lo, hi)
        .into_iter()
        .filter_map(|c| clip_segment_params(&cells[c], seg, eps).map(|(t0, t1)| (c, t0, t1)))
        .collect();
    let mut breaks: Vec<T> = hits.iter().flat_map(|&(_, a, b)| [a, b]).collect();
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let len = seg.length();
    breaks.dedup_by(|x, y| (*x - *y) * len <= eps);
    let mut out: Vec<(usize, T, T)> = Vec::new();
    for w in breaks.windows(2) {
        let mid = (w[0] + w[1]) * T::lit(0.5);
        let owner = hits
            .iter()
            .filter(|&&(_, a, b)| a <= mid && mid <= b)
            .map(|&(c, _, _)| c)
            .min();
        if let Some(c) = owner {
            match out.last_mut() {
                Some(last) if last.0 == c && last.2 == w[0] => last.2 = w[1],
                _ => out.push((c, w[0], w[1])),
            }
        }
    }
    out
}

/// Segment pieces inside each cell of `cells`, with two-point Gauss rules.
pub fn tri_seg_overlap<T: Scalar>(cells: &[ConvexPolygon2<T>], seg: &Segment2<T>, eps: T) -> OverlapTable<T> {
    let grid = CellGrid::new(cells);
    let len = seg.length();
    let entries = segment_cover(cells, &grid, seg, eps)
        .into_iter()
        .map(|(c, t0, t1)| {
            let h = t1 - t0;
            let (points, weights) = SEG_GAUSS2
                .iter()
                .map(|&(x, w)| (seg.at(t0 + h * T::lit(x)), T::lit(w) * h * len))
                .unzip();
            OverlapEntry {
                a: c,
                b: 0,
                measure: h * len,
                points,
                weights,
            }
        })
        .collect();
    OverlapTable { entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    fn two_triangles(offset: f64) -> Vec<ConvexPolygon2<f64>> {
        vec![
            ConvexPolygon2::triangle(v(offset, 0.), v(offset + 1., 0.), v(offset + 1., 1.)),
            ConvexPolygon2::triangle(v(offset, 0.), v(offset + 1., 1.), v(offset, 1.)),
        ]
    }

    #[test]
    fn identity_and_disjoint() {
        let a = vec![ConvexPolygon2::triangle(v(0., 0.), v(1., 0.), v(0., 1.))];
        let t = tri_tri_overlap(&a, &a, 1e-12);
        assert_eq!(t.len(), 1);
        assert!((t.entries[0].measure - 0.5).abs() < 1e-15);
        assert!(tri_tri_overlap(&a, &two_triangles(5.0), 1e-12).is_empty());
    }

    #[test]
    fn quadratic_integrand_on_crossing_meshes() {
        // Diagonals in opposite directions: every pair intersection is a triangle.
        let a = two_triangles(0.0);
        let b = vec![
            ConvexPolygon2::triangle(v(0., 0.), v(1., 0.), v(0., 1.)),
            ConvexPolygon2::triangle(v(1., 0.), v(1., 1.), v(0., 1.)),
        ];
        let t = tri_tri_overlap(&a, &b, 1e-12);
        assert_eq!(t.len(), 4);
        // ∫_{[0,1]^2} x^2 + xy = 1/3 + 1/4
        let val = t.integrate(|p| p.x * p.x + p.x * p.y);
        assert!((val - 7.0 / 12.0).abs() < 1e-14);
        // weights per a-cell equal its area
        for ia in 0..2 {
            let s: f64 = t.entries.iter().filter(|e| e.a == ia).flat_map(|e| &e.weights).sum();
            assert!((s - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn segment_on_shared_edge_counted_once() {
        let cells = two_triangles(0.0);
        let seg = Segment2::new(v(0., 0.), v(1., 1.));
        let t = tri_seg_overlap(&cells, &seg, 1e-12);
        assert_eq!(t.len(), 1);
        assert!((t.total_measure() - 2f64.sqrt()).abs() < 1e-14);
        let seg = Segment2::new(v(-0.5, 0.5), v(1.5, 0.5));
        let t = tri_seg_overlap(&cells, &seg, 1e-12);
        assert_eq!(t.len(), 2);
        assert!((t.total_measure() - 1.0).abs() < 1e-14);
    }
}
