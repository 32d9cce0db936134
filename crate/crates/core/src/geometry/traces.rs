//! Fracture-fracture intersection segments.

use super::fracture::{Fracture, Trace};
use super::polygon::{intersect_convex_polygons, ConvexPolygon2, HalfPlane};
use super::vector::{Vec2, Vec3};
use crate::error::{Error, Result};
use crate::Scalar;

/// Parameter interval of the line `p0 + t d` inside fracture `f` (slack `eps`).
fn line_interval<T: Scalar>(f: &Fracture<T>, p0: Vec3<T>, d: Vec3<T>, eps: T) -> Option<(T, T)> {
    let a = f.frame.project(p0);
    let dir = f.frame.project_direction(d);
    let (mut t0, mut t1) = (T::neg_infinity(), T::infinity());
    for h in f.polygon.halfplanes() {
        // s(t) = s0 + t * ds
        let s0 = h.signed_distance(a);
        let ds = h.normal.dot(dir);
        if ds.abs() <= T::epsilon() {
            if s0 < -eps {
                return None;
            }
            continue;
        }
        let t = -s0 / ds;
        if ds > T::zero() {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
    }
    (t0 < t1).then_some((t0, t1))
}

/// Intersection segment of two fractures, if it has length above `eps`.
pub fn intersect_fractures<T: Scalar>(fi: &Fracture<T>, fj: &Fracture<T>, eps: T) -> Result<Option<[Vec3<T>; 2]>> {
    let (ni, nj) = (fi.frame.normal, fj.frame.normal);
    let cross = ni.cross(nj);
    if cross.norm() <= T::lit(1e-10) {
        if fi.frame.signed_distance(fj.frame.origin).abs() > eps {
            return Ok(None);
        }
        let other: Vec<Vec2<T>> = fj.vertices.iter().map(|&p| fi.frame.project(p)).collect();
        let other = ConvexPolygon2::convex_hull(&other, eps);
        if let Some(other) = other {
            if intersect_convex_polygons(&fi.polygon, &other, eps).is_some() {
                return Err(Error::NonSegmentIntersection(fi.id, fj.id));
            }
        }
        return Ok(None);
    }
    let d = cross.normalized();
    let (ci, cj) = (ni.dot(fi.frame.origin), nj.dot(fj.frame.origin));
    let nn = ni.dot(nj);
    let det = T::one() - nn * nn;
    let p0 = ni * ((ci - cj * nn) / det) + nj * ((cj - ci * nn) / det);
    let Some((a0, a1)) = line_interval(fi, p0, d, eps) else {
        return Ok(None);
    };
    let Some((b0, b1)) = line_interval(fj, p0, d, eps) else {
        return Ok(None);
    };
    let (t0, t1) = (a0.max(b0), a1.min(b1));
    if t1 - t0 <= eps {
        return Ok(None);
    }
    Ok(Some([p0 + d * t0, p0 + d * t1]))
}

/// All traces of a fracture set, one per intersecting pair `(i, j)`, `i < j`.
///
/// Fails when two fractures overlap in a planar region or when one geometric segment
/// is shared by more than two fractures.
pub fn compute_traces<T: Scalar>(fractures: &[Fracture<T>], eps: T) -> Result<Vec<Trace<T>>> {
    let mut traces = Vec::new();
    for i in 0..fractures.len() {
        for j in i + 1..fractures.len() {
            let (fi, fj) = (&fractures[i], &fractures[j]);
            if let Some(endpoints) = intersect_fractures(fi, fj, eps)? {
                let dir = endpoints[1] - endpoints[0];
                let normal_on = |f: &Fracture<T>| f.frame.project_direction(dir).normalized().perp();
                traces.push(Trace {
                    id: traces.len(),
                    endpoints,
                    fractures: (i, j),
                    normals: [normal_on(fi), normal_on(fj)],
                });
            }
        }
    }
    check_distinct(&traces, eps)?;
    Ok(traces)
}

fn check_distinct<T: Scalar>(traces: &[Trace<T>], eps: T) -> Result<()> {
    for (a, ta) in traces.iter().enumerate() {
        let origin = ta.endpoints[0];
        let len = ta.length();
        let dir = (ta.endpoints[1] - origin) / len;
        let off_line = |p: Vec3<T>| {
            let r = p - origin;
            (r - dir * r.dot(dir)).norm()
        };
        for tb in &traces[a + 1..] {
            if off_line(tb.endpoints[0]) > eps || off_line(tb.endpoints[1]) > eps {
                continue;
            }
            let s0 = (tb.endpoints[0] - origin).dot(dir);
            let s1 = (tb.endpoints[1] - origin).dot(dir);
            let overlap = s0.max(s1).min(len) - s0.min(s1).max(T::zero());
            if overlap > eps {
                return Err(Error::AssumptionViolated(format!(
                    "traces of fracture pairs {:?} and {:?} share a segment",
                    ta.fractures, tb.fractures
                )));
            }
        }
    }
    Ok(())
}

/// Half-plane of fracture `f` on the positive side of a trace (used by tests and diagnostics).
pub fn trace_halfplane<T: Scalar>(trace: &Trace<T>, f: &Fracture<T>, side: usize) -> HalfPlane<T> {
    let [a, _] = trace.local_endpoints(f);
    HalfPlane::new(a, trace.normals[side])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fracture::BoundaryCondition;

    fn frac(id: usize, v: &[[f64; 3]]) -> Fracture<f64> {
        Fracture::uniform(
            id,
            v.iter().map(|&p| Vec3::from_f64(p)).collect(),
            BoundaryCondition::insulated(),
            1e-12,
        )
        .unwrap()
    }

    fn horizontal() -> Fracture<f64> {
        frac(0, &[[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]])
    }

    fn vertical() -> Fracture<f64> {
        frac(1, &[[0.5, 0., -0.5], [0.5, 1., -0.5], [0.5, 1., 0.5], [0.5, 0., 0.5]])
    }

    #[test]
    fn orthogonal_squares_meet_in_one_trace() {
        let t = compute_traces(&[horizontal(), vertical()], 1e-9).unwrap();
        assert_eq!(t.len(), 1);
        let mut e = t[0].endpoints;
        if e[0].y > e[1].y {
            e.swap(0, 1);
        }
        assert!((e[0] - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-12);
        assert!((e[1] - Vec3::new(0.5, 1.0, 0.0)).norm() < 1e-12);
        assert_eq!(t[0].fractures, (0, 1));
        for (k, f) in [horizontal(), vertical()].iter().enumerate() {
            let [a, b] = t[0].local_endpoints(f);
            assert!(t[0].normals[k].dot(b - a).abs() < 1e-12);
            assert!((t[0].normals[k].norm() - 1.0).abs() < 1e-12);
            // +90 degree rotation of the trace direction
            assert!((b - a).normalized().cross(t[0].normals[k]) > 0.0);
        }
    }

    #[test]
    fn parallel_disjoint_fractures_have_no_trace() {
        let a = horizontal();
        let b = frac(1, &[[0., 0., 0.3], [1., 0., 0.3], [1., 1., 0.3], [0., 1., 0.3]]);
        assert!(compute_traces(&[a, b], 1e-9).unwrap().is_empty());
    }

    #[test]
    fn point_contact_is_not_a_trace() {
        let a = horizontal();
        let b = frac(1, &[[1., 1., 0.], [2., 1., 0.5], [2., 2., 0.5]]);
        assert!(compute_traces(&[a, b], 1e-9).unwrap().is_empty());
    }

    #[test]
    fn coplanar_overlap_is_rejected() {
        let a = horizontal();
        let b = frac(1, &[[0.5, 0.5, 0.], [1.5, 0.5, 0.], [1.5, 1.5, 0.], [0.5, 1.5, 0.]]);
        assert!(matches!(
            compute_traces(&[a, b], 1e-9),
            Err(Error::NonSegmentIntersection(0, 1))
        ));
    }

    #[test]
    fn three_fractures_through_one_segment_are_rejected() {
        let c = frac(2, &[[0., 0., -0.5], [1., 1., -0.5], [1., 1., 0.5], [0., 0., 0.5]]);
        let d = frac(3, &[[0., 0., 0.], [1., 0., 1.], [1., 1., 0.], [0., 1., -1.]]);
        // c and d share the diagonal segment with the horizontal square
        let res = compute_traces(&[horizontal(), c, d], 1e-9);
        assert!(matches!(res, Err(Error::AssumptionViolated(_))), "{res:?}");
    }

    #[test]
    fn trace_is_order_independent() {
        let a = horizontal();
        let b = vertical();
        let t1 = compute_traces(&[a.clone(), b.clone()], 1e-9).unwrap();
        let t2 = compute_traces(&[b, a], 1e-9).unwrap();
        let key = |t: &Trace<f64>| {
            let mut e = t.endpoints.map(|p| (p.x, p.y, p.z));
            e.sort_by(|p, q| p.partial_cmp(q).unwrap());
            e
        };
        let (k1, k2) = (key(&t1[0]), key(&t2[0]));
        for (p, q) in k1.iter().zip(k2.iter()) {
            assert!((p.0 - q.0).abs() + (p.1 - q.1).abs() + (p.2 - q.2).abs() < 1e-12);
        }
    }
}
