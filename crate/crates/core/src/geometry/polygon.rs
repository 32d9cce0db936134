//! Convex polygons in a fracture's local frame and the clipping kernels used by
//! every cross-mesh intersection.

use super::vector::{orient2d, Vec2};
use crate::error::{Error, Result};
use crate::Scalar;

/// Half-plane `{p : normal . (p - point) >= 0}` with a unit inward normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane<T> {
    pub point: Vec2<T>,
    pub normal: Vec2<T>,
}

impl<T: Scalar> HalfPlane<T> {
    /// The normal is normalized on construction.
    pub fn new(point: Vec2<T>, normal: Vec2<T>) -> Self {
        Self {
            point,
            normal: normal.normalized(),
        }
    }

    /// Half-plane to the left of the directed edge `a -> b`.
    pub fn left_of(a: Vec2<T>, b: Vec2<T>) -> Self {
        Self::new(a, (b - a).perp())
    }

    #[inline]
    pub fn signed_distance(&self, p: Vec2<T>) -> T {
        self.normal.dot(p - self.point)
    }

    pub fn flipped(&self) -> Self {
        Self {
            point: self.point,
            normal: -self.normal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment2<T> {
    pub a: Vec2<T>,
    pub b: Vec2<T>,
}

impl<T: Scalar> Segment2<T> {
    pub fn new(a: Vec2<T>, b: Vec2<T>) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> T {
        (self.b - self.a).norm()
    }

    #[inline]
    pub fn at(&self, t: T) -> Vec2<T> {
        self.a + (self.b - self.a) * t
    }
}

/// Convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon2<T> {
    vertices: Vec<Vec2<T>>,
}

impl<T: Scalar> ConvexPolygon2<T> {
    /// Validates convexity, orientation and vertex separation.
    pub fn new(vertices: Vec<Vec2<T>>, eps: T) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidGeometry(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let poly = Self { vertices };
        let n = poly.vertices.len();
        for i in 0..n {
            let a = poly.vertices[i];
            let b = poly.vertices[(i + 1) % n];
            let c = poly.vertices[(i + 2) % n];
            if (b - a).norm() <= eps {
                return Err(Error::InvalidGeometry(format!(
                    "vertices {i} and {} closer than tolerance",
                    (i + 1) % n
                )));
            }
            let turn = orient2d(a, b, c) / (c - b).norm();
            if turn < -eps {
                return Err(Error::InvalidGeometry(format!(
                    "polygon is not convex counter-clockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        if poly.signed_area() <= T::zero() {
            return Err(Error::InvalidGeometry("polygon has non-positive area".into()));
        }
        Ok(poly)
    }

    /// Trusts the caller on orientation and convexity.
    pub(crate) fn from_ccw_unchecked(vertices: Vec<Vec2<T>>) -> Self {
        Self { vertices }
    }

    pub fn triangle(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> Self {
        if orient2d(a, b, c) >= T::zero() {
            Self::from_ccw_unchecked(vec![a, b, c])
        } else {
            Self::from_ccw_unchecked(vec![a, c, b])
        }
    }

    /// Convex hull of a point cloud (monotone chain); `None` when the hull has no area.
    pub fn convex_hull(points: &[Vec2<T>], eps: T) -> Option<Self> {
        let mut pts = points.to_vec();
        pts.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap().then(p.y.partial_cmp(&q.y).unwrap()));
        pts.dedup_by(|p, q| (*p - *q).norm() <= eps);
        if pts.len() < 3 {
            return None;
        }
        let mut hull: Vec<Vec2<T>> = Vec::with_capacity(2 * pts.len());
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &Vec2<T>>> = if pass == 0 {
                Box::new(pts.iter())
            } else {
                Box::new(pts.iter().rev())
            };
            for &p in iter {
                while hull.len() >= start + 2 && orient2d(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero() {
                    hull.pop();
                }
                hull.push(p);
            }
            hull.pop();
        }
        finish(hull, eps)
    }

    pub fn vertices(&self) -> &[Vec2<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn signed_area(&self) -> T {
        let n = self.vertices.len();
        let o = self.vertices[0];
        let mut twice = T::zero();
        for i in 1..n - 1 {
            twice = twice + orient2d(o, self.vertices[i], self.vertices[i + 1]);
        }
        twice * T::lit(0.5)
    }

    pub fn area(&self) -> T {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> T {
        self.edges().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn centroid(&self) -> Vec2<T> {
        let o = self.vertices[0];
        let mut acc = Vec2::zero();
        let mut total = T::zero();
        for i in 1..self.vertices.len() - 1 {
            let (b, c) = (self.vertices[i], self.vertices[i + 1]);
            let w = orient2d(o, b, c);
            acc += (o + b + c) * (w / T::lit(3.0));
            total = total + w;
        }
        if total == T::zero() {
            return o;
        }
        acc / total
    }

    pub fn bbox(&self) -> (Vec2<T>, Vec2<T>) {
        let mut lo = self.vertices[0];
        let mut hi = lo;
        for p in &self.vertices[1..] {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// Directed edges `(v_i, v_{i+1})`.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2<T>, Vec2<T>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Inward half-planes of all edges.
    pub fn halfplanes(&self) -> impl Iterator<Item = HalfPlane<T>> + '_ {
        self.edges().map(|(a, b)| HalfPlane::left_of(a, b))
    }

    /// Point membership with tolerance `eps` outside the boundary.
    pub fn contains(&self, p: Vec2<T>, eps: T) -> bool {
        self.halfplanes().all(|h| h.signed_distance(p) >= -eps)
    }

    /// Distance from `p` to the polygon (zero inside).
    pub fn distance(&self, p: Vec2<T>) -> T {
        if self.contains(p, T::zero()) {
            return T::zero();
        }
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(T::infinity(), T::min)
    }

    /// Fan triangulation from the first vertex.
    pub fn fan(&self) -> impl Iterator<Item = [Vec2<T>; 3]> + '_ {
        let o = self.vertices[0];
        (1..self.vertices.len() - 1).map(move |i| [o, self.vertices[i], self.vertices[i + 1]])
    }

    pub fn clip(&self, h: &HalfPlane<T>, eps: T) -> Option<Self> {
        clip_polygon_halfplane(self, h, eps)
    }

    pub fn intersect(&self, other: &Self, eps: T) -> Option<Self> {
        intersect_convex_polygons(self, other, eps)
    }
}

pub fn point_segment_distance<T: Scalar>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == T::zero() {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    (p - (a + ab * t)).norm()
}

/// Merges near-coincident consecutive vertices and rejects slivers narrower than `eps`.
fn finish<T: Scalar>(mut verts: Vec<Vec2<T>>, eps: T) -> Option<ConvexPolygon2<T>> {
    let mut i = 0;
    while verts.len() > 1 && i < verts.len() {
        let j = (i + 1) % verts.len();
        if (verts[i] - verts[j]).norm() <= eps {
            verts.remove(j);
            if j < i {
                i -= 1;
            }
        } else {
            i += 1;
        }
    }
    if verts.len() < 3 {
        return None;
    }
    let poly = ConvexPolygon2::from_ccw_unchecked(verts);
    let area = poly.signed_area();
    if area <= eps * poly.perimeter() * T::lit(0.5) {
        return None;
    }
    Some(poly)
}

/// Sutherland-Hodgman clip of a convex polygon against one half-plane.
///
/// Vertices within `eps` of the line are kept as they are; the result is empty when
/// the polygon lies less than `eps` inside the half-plane.
pub fn clip_polygon_halfplane<T: Scalar>(
    poly: &ConvexPolygon2<T>,
    h: &HalfPlane<T>,
    eps: T,
) -> Option<ConvexPolygon2<T>> {
    let dist: Vec<T> = poly.vertices.iter().map(|&p| h.signed_distance(p)).collect();
    let max = dist.iter().copied().fold(T::neg_infinity(), T::max);
    if max < eps {
        return None;
    }
    let min = dist.iter().copied().fold(T::infinity(), T::min);
    if min >= -eps {
        return Some(poly.clone());
    }
    let n = poly.vertices.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (p, q) = (poly.vertices[i], poly.vertices[j]);
        let (sp, sq) = (dist[i], dist[j]);
        if sp >= -eps {
            out.push(p);
        }
        if (sp > eps && sq < -eps) || (sp < -eps && sq > eps) {
            let t = sp / (sp - sq);
            out.push(p + (q - p) * t);
        }
    }
    finish(out, eps)
}

/// Intersection of two convex polygons by clipping `a` against every edge of `b`.
pub fn intersect_convex_polygons<T: Scalar>(
    a: &ConvexPolygon2<T>,
    b: &ConvexPolygon2<T>,
    eps: T,
) -> Option<ConvexPolygon2<T>> {
    let (alo, ahi) = a.bbox();
    let (blo, bhi) = b.bbox();
    if alo.x > bhi.x + eps || blo.x > ahi.x + eps || alo.y > bhi.y + eps || blo.y > ahi.y + eps {
        return None;
    }
    let mut cur = a.clone();
    for h in b.halfplanes() {
        cur = clip_polygon_halfplane(&cur, &h, eps)?;
    }
    Some(cur)
}

/// Parameter interval `[t0, t1]` of `seg` inside `poly` (Cyrus-Beck), with `eps` slack.
pub fn clip_segment_params<T: Scalar>(poly: &ConvexPolygon2<T>, seg: &Segment2<T>, eps: T) -> Option<(T, T)> {
    let len = seg.length();
    if len <= T::zero() {
        return None;
    }
    let (mut t0, mut t1) = (T::zero(), T::one());
    for h in poly.halfplanes() {
        let sa = h.signed_distance(seg.a);
        let sb = h.signed_distance(seg.b);
        if sa < -eps && sb < -eps {
            return None;
        }
        if sa < T::zero() && sb > T::zero() {
            t0 = t0.max(sa / (sa - sb));
        } else if sb < T::zero() && sa > T::zero() {
            t1 = t1.min(sa / (sa - sb));
        } else if sa < T::zero() && sb < T::zero() {
            // Both within the slack band: the segment runs along this edge.
            continue;
        }
        if t0 >= t1 {
            return None;
        }
    }
    if (t1 - t0) * len <= eps {
        return None;
    }
    Some((t0, t1))
}

/// Portion of `seg` inside `poly`, or `None` if shorter than `eps`.
pub fn intersect_polygon_segment<T: Scalar>(
    poly: &ConvexPolygon2<T>,
    seg: &Segment2<T>,
    eps: T,
) -> Option<Segment2<T>> {
    clip_segment_params(poly, seg, eps).map(|(t0, t1)| Segment2::new(seg.at(t0), seg.at(t1)))
}

/// Separating-axis test between a convex polygon and the convex hull of `points`
/// (which may be degenerate: a point or a segment), with tolerance `eps`.
pub fn touches<T: Scalar>(poly: &ConvexPolygon2<T>, points: &[Vec2<T>], eps: T) -> bool {
    if points.is_empty() {
        return false;
    }
    let separated = |axis: Vec2<T>| {
        let n = axis.norm();
        if n == T::zero() {
            return false;
        }
        let axis = axis / n;
        let (mut pmin, mut pmax) = (T::infinity(), T::neg_infinity());
        for v in poly.vertices() {
            let s = axis.dot(*v);
            pmin = pmin.min(s);
            pmax = pmax.max(s);
        }
        let (mut qmin, mut qmax) = (T::infinity(), T::neg_infinity());
        for v in points {
            let s = axis.dot(*v);
            qmin = qmin.min(s);
            qmax = qmax.max(s);
        }
        qmin > pmax + eps || pmin > qmax + eps
    };
    if poly.edges().any(|(a, b)| separated((b - a).perp())) {
        return false;
    }
    let m = points.len();
    for i in 0..m {
        for j in i + 1..m {
            if separated((points[j] - points[i]).perp()) {
                return false;
            }
        }
    }
    true
}
