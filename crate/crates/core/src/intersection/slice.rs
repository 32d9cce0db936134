//! Cutting tetrahedra with fracture planes.

use crate::geometry::{ConvexPolygon2, Fracture, Frame, Vec2, Vec3};
use crate::Scalar;

/// How a tetrahedron meets a plane.
#[derive(Clone, Debug, PartialEq)]
pub enum PlaneContact<T> {
    /// No common point.
    Miss,
    /// Common set of zero area (a vertex, an edge, or a face owned by the other side).
    Touch(Vec<Vec2<T>>),
    /// Positive-area convex section, in the plane's local frame.
    Cut(ConvexPolygon2<T>),
}

impl<T: Scalar> PlaneContact<T> {
    /// Points of the contact set (empty on a miss).
    pub fn points(&self) -> &[Vec2<T>] {
        match self {
            PlaneContact::Miss => &[],
            PlaneContact::Touch(p) => p,
            PlaneContact::Cut(poly) => poly.vertices(),
        }
    }
}

/// Intersection of a tetrahedron with the plane of `frame`.
///
/// A face lying in the plane belongs to the tetrahedron on the side the normal points
/// to; the tetrahedron on the other side only touches.
pub fn slice_tet<T: Scalar>(p: &[Vec3<T>; 4], frame: &Frame<T>, eps: T) -> PlaneContact<T> {
    let d = p.map(|x| frame.signed_distance(x));
    let on: Vec<usize> = (0..4).filter(|&k| d[k].abs() <= eps).collect();
    let pos = (0..4).filter(|&k| d[k] > eps).count();
    let neg = (0..4).filter(|&k| d[k] < -eps).count();
    let mut pts: Vec<Vec2<T>> = on.iter().map(|&k| frame.project(p[k])).collect();
    if pos == 0 && neg == 0 {
        return PlaneContact::Touch(pts);
    }
    if on.len() == 3 {
        return if pos == 1 {
            match ConvexPolygon2::convex_hull(&pts, eps) {
                Some(poly) => PlaneContact::Cut(poly),
                None => PlaneContact::Touch(pts),
            }
        } else {
            PlaneContact::Touch(pts)
        };
    }
    if pos == 0 || neg == 0 {
        return if on.is_empty() {
            PlaneContact::Miss
        } else {
            PlaneContact::Touch(pts)
        };
    }
    for a in 0..4 {
        for b in a + 1..4 {
            if (d[a] > eps && d[b] < -eps) || (d[a] < -eps && d[b] > eps) {
                let s = d[a] / (d[a] - d[b]);
                pts.push(frame.project(p[a] + (p[b] - p[a]) * s));
            }
        }
    }
    match ConvexPolygon2::convex_hull(&pts, eps) {
        Some(poly) => PlaneContact::Cut(poly),
        None => PlaneContact::Touch(pts),
    }
}

/// Section of a tetrahedron by the fracture, clipped to the fracture polygon.
pub fn slice_tet_by_fracture<T: Scalar>(p: &[Vec3<T>; 4], fracture: &Fracture<T>, eps: T) -> Option<ConvexPolygon2<T>> {
    match slice_tet(p, &fracture.frame, eps) {
        PlaneContact::Cut(poly) => poly.intersect(&fracture.polygon, eps),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryCondition;

    fn reference_tet() -> [Vec3<f64>; 4] {
        [
            Vec3::zero(),
            Vec3::new(1., 0., 0.),
            Vec3::new(0., 1., 0.),
            Vec3::new(0., 0., 1.),
        ]
    }

    fn horizontal(z: f64) -> Fracture<f64> {
        Fracture::uniform(
            0,
            vec![
                Vec3::new(-1., -1., z),
                Vec3::new(2., -1., z),
                Vec3::new(2., 2., z),
                Vec3::new(-1., 2., z),
            ],
            BoundaryCondition::insulated(),
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn midplane_slice() {
        let f = horizontal(0.5);
        let s = slice_tet_by_fracture(&reference_tet(), &f, 1e-12).unwrap();
        assert_eq!(s.len(), 3);
        assert!((s.area() - 0.125).abs() < 1e-14);
        assert!(slice_tet_by_fracture(&reference_tet(), &horizontal(2.0), 1e-12).is_none());
    }

    #[test]
    fn quadrilateral_section() {
        // plane x + y = 0.8 style cut through two-two vertex split
        let f = Fracture::uniform(
            0,
            vec![
                Vec3::new(0.5, -2., -2.),
                Vec3::new(0.5, 2., -2.),
                Vec3::new(0.5, 2., 2.),
                Vec3::new(0.5, -2., 2.),
            ],
            BoundaryCondition::insulated(),
            1e-12,
        )
        .unwrap();
        let t = [
            Vec3::zero(),
            Vec3::new(1., 0., 0.),
            Vec3::new(0., 1., 0.),
            Vec3::new(1., 1., 1.),
        ];
        let s = slice_tet_by_fracture(&t, &f, 1e-12).unwrap();
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn face_on_plane_goes_to_positive_side() {
        let f = horizontal(0.0);
        let up = reference_tet();
        let mut down = up;
        down[3] = Vec3::new(0., 0., -1.);
        assert!(matches!(slice_tet(&up, &f.frame, 1e-12), PlaneContact::Cut(_)));
        assert!(matches!(slice_tet(&down, &f.frame, 1e-12), PlaneContact::Touch(_)));
    }
}
