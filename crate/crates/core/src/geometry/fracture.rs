//! Problem data: the porous block, planar fractures, their local frames and
//! boundary data.

use std::fmt;
use std::sync::Arc;

use super::polygon::ConvexPolygon2;
use super::vector::{Vec2, Vec3};
use crate::error::{Error, Result};
use crate::Scalar;

/// Scalar function of 3D position (sources, boundary data).
#[derive(Clone)]
pub enum ScalarField<T> {
    Constant(T),
    Function(Arc<dyn Fn(Vec3<T>) -> T + Send + Sync>),
}

impl<T: Scalar> ScalarField<T> {
    pub fn zero() -> Self {
        Self::Constant(T::zero())
    }

    pub fn function(f: impl Fn(Vec3<T>) -> T + Send + Sync + 'static) -> Self {
        Self::Function(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, p: Vec3<T>) -> T {
        match self {
            Self::Constant(c) => *c,
            Self::Function(f) => f(p),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Constant(c) if *c == T::zero())
    }
}

impl<T: fmt::Debug> fmt::Debug for ScalarField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c:?})"),
            Self::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// Boundary tag with its datum. Neumann data is the outward co-normal flux `K grad h . n`.
#[derive(Clone, Debug)]
pub enum BoundaryCondition<T> {
    Dirichlet(ScalarField<T>),
    Neumann(ScalarField<T>),
}

impl<T: Scalar> BoundaryCondition<T> {
    pub fn dirichlet(value: T) -> Self {
        Self::Dirichlet(ScalarField::Constant(value))
    }

    pub fn neumann(value: T) -> Self {
        Self::Neumann(ScalarField::Constant(value))
    }

    pub fn insulated() -> Self {
        Self::neumann(T::zero())
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, Self::Dirichlet(_))
    }

    pub fn field(&self) -> &ScalarField<T> {
        match self {
            Self::Dirichlet(f) | Self::Neumann(f) => f,
        }
    }
}

/// Symmetric 2x2 tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor2<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

impl<T: Scalar> Tensor2<T> {
    pub fn isotropic(k: T) -> Self {
        Self {
            xx: k,
            xy: T::zero(),
            yy: k,
        }
    }

    #[inline]
    pub fn apply(&self, v: Vec2<T>) -> Vec2<T> {
        Vec2::new(self.xx * v.x + self.xy * v.y, self.xy * v.x + self.yy * v.y)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.xx > T::zero() && self.xx * self.yy - self.xy * self.xy > T::zero()
    }
}

/// Symmetric 3x3 tensor stored densely.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor3<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Scalar> Tensor3<T> {
    pub fn isotropic(k: T) -> Self {
        let z = T::zero();
        Self {
            m: [[k, z, z], [z, k, z], [z, z, k]],
        }
    }

    #[inline]
    pub fn apply(&self, v: Vec3<T>) -> Vec3<T> {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        let m = &self.m;
        (m[0][1] - m[1][0]).abs() <= tol && (m[0][2] - m[2][0]).abs() <= tol && (m[1][2] - m[2][1]).abs() <= tol
    }

    /// Sylvester's criterion.
    pub fn is_positive_definite(&self) -> bool {
        let m = &self.m;
        let d1 = m[0][0];
        let d2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let d3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        d1 > T::zero() && d2 > T::zero() && d3 > T::zero()
    }
}

/// Faces of the axis-aligned block, in `xmin, xmax, ymin, ymax, zmin, zmax` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoxFace {
    XMin = 0,
    XMax = 1,
    YMin = 2,
    YMax = 3,
    ZMin = 4,
    ZMax = 5,
}

impl BoxFace {
    pub const ALL: [BoxFace; 6] = [
        BoxFace::XMin,
        BoxFace::XMax,
        BoxFace::YMin,
        BoxFace::YMax,
        BoxFace::ZMin,
        BoxFace::ZMax,
    ];

    pub fn axis(self) -> usize {
        self as usize / 2
    }

    pub fn is_max(self) -> bool {
        self as usize % 2 == 1
    }

    pub fn name(self) -> &'static str {
        ["xmin", "xmax", "ymin", "ymax", "zmin", "zmax"][self as usize]
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// Axis-aligned porous block with its transmissivity, source and face data.
#[derive(Clone, Debug)]
pub struct PorousDomain<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
    pub permeability: Tensor3<T>,
    pub face_bc: [BoundaryCondition<T>; 6],
    pub source: ScalarField<T>,
}

impl<T: Scalar> PorousDomain<T> {
    pub fn new(
        min: Vec3<T>,
        max: Vec3<T>,
        permeability: Tensor3<T>,
        face_bc: [BoundaryCondition<T>; 6],
        source: ScalarField<T>,
    ) -> Result<Self> {
        if !(min.x < max.x && min.y < max.y && min.z < max.z) {
            return Err(Error::InvalidGeometry("box corners are not ordered".into()));
        }
        if !permeability.is_symmetric(T::lit(1e-12)) || !permeability.is_positive_definite() {
            return Err(Error::InvalidParameter(
                "matrix transmissivity must be symmetric positive definite".into(),
            ));
        }
        Ok(Self {
            min,
            max,
            permeability,
            face_bc,
            source,
        })
    }

    /// Unit-transmissivity block with homogeneous Neumann data on every face and no source.
    pub fn insulated_box(min: Vec3<T>, max: Vec3<T>) -> Result<Self> {
        Self::new(
            min,
            max,
            Tensor3::isotropic(T::one()),
            std::array::from_fn(|_| BoundaryCondition::insulated()),
            ScalarField::zero(),
        )
    }

    pub fn diameter(&self) -> T {
        (self.max - self.min).norm()
    }

    /// Scale-relative geometric tolerance.
    pub fn eps_geo(&self) -> T {
        T::lit(1e-9) * self.diameter()
    }

    pub fn volume(&self) -> T {
        let e = self.max - self.min;
        e.x * e.y * e.z
    }

    pub fn bc(&self, face: BoxFace) -> &BoundaryCondition<T> {
        &self.face_bc[face as usize]
    }

    pub fn has_dirichlet(&self) -> bool {
        self.face_bc.iter().any(BoundaryCondition::is_dirichlet)
    }

    pub fn contains(&self, p: Vec3<T>, eps: T) -> bool {
        (0..3).all(|a| p.get(a) >= self.min.get(a) - eps && p.get(a) <= self.max.get(a) + eps)
    }

    /// Faces the point lies on (within `eps`).
    pub fn faces_of(&self, p: Vec3<T>, eps: T) -> impl Iterator<Item = BoxFace> + '_ {
        BoxFace::ALL.into_iter().filter(move |f| {
            let a = f.axis();
            let plane = if f.is_max() { self.max.get(a) } else { self.min.get(a) };
            (p.get(a) - plane).abs() <= eps
        })
    }
}

/// Orthonormal frame of a fracture plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame<T> {
    pub origin: Vec3<T>,
    pub e1: Vec3<T>,
    pub e2: Vec3<T>,
    pub normal: Vec3<T>,
}

impl<T: Scalar> Frame<T> {
    /// Frame with the Newell normal of `vertices`, first axis along the first edge.
    pub fn from_polygon(vertices: &[Vec3<T>]) -> Result<Self> {
        let n = vertices.len();
        let mut normal = Vec3::zero();
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            normal += Vec3::new(
                (a.y - b.y) * (a.z + b.z),
                (a.z - b.z) * (a.x + b.x),
                (a.x - b.x) * (a.y + b.y),
            );
        }
        if normal.norm() == T::zero() {
            return Err(Error::InvalidGeometry("degenerate fracture polygon".into()));
        }
        let normal = normal.normalized();
        let e1 = vertices[1] - vertices[0];
        let e1 = (e1 - normal * e1.dot(normal)).normalized();
        let e2 = normal.cross(e1);
        Ok(Self {
            origin: vertices[0],
            e1,
            e2,
            normal,
        })
    }

    #[inline]
    pub fn signed_distance(&self, p: Vec3<T>) -> T {
        self.normal.dot(p - self.origin)
    }

    /// Orthogonal projection into local coordinates, without the on-plane check.
    #[inline]
    pub fn project(&self, p: Vec3<T>) -> Vec2<T> {
        let d = p - self.origin;
        Vec2::new(d.dot(self.e1), d.dot(self.e2))
    }

    pub fn to_local(&self, p: Vec3<T>, eps: T) -> Result<Vec2<T>> {
        let dist = self.signed_distance(p).abs();
        if dist > eps {
            return Err(Error::OffPlane {
                distance: dist.as_f64(),
                tolerance: eps.as_f64(),
            });
        }
        Ok(self.project(p))
    }

    #[inline]
    pub fn from_local(&self, q: Vec2<T>) -> Vec3<T> {
        self.origin + self.e1 * q.x + self.e2 * q.y
    }

    /// In-plane components of a 3D direction.
    #[inline]
    pub fn project_direction(&self, d: Vec3<T>) -> Vec2<T> {
        Vec2::new(d.dot(self.e1), d.dot(self.e2))
    }
}

/// Planar convex fracture with its tangential transmissivity and edge data.
#[derive(Clone, Debug)]
pub struct Fracture<T> {
    pub id: usize,
    pub vertices: Vec<Vec3<T>>,
    pub frame: Frame<T>,
    pub polygon: ConvexPolygon2<T>,
    pub permeability: Tensor2<T>,
    /// One condition per polygon edge `(v_k, v_{k+1})`.
    pub edge_bc: Vec<BoundaryCondition<T>>,
    pub source: ScalarField<T>,
}

impl<T: Scalar> Fracture<T> {
    pub fn new(
        id: usize,
        vertices: Vec<Vec3<T>>,
        permeability: Tensor2<T>,
        edge_bc: Vec<BoundaryCondition<T>>,
        eps: T,
    ) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidGeometry(format!(
                "fracture {id} needs at least 3 vertices"
            )));
        }
        if edge_bc.len() != vertices.len() {
            return Err(Error::InvalidParameter(format!(
                "fracture {id}: {} edge conditions for {} edges",
                edge_bc.len(),
                vertices.len()
            )));
        }
        if !permeability.is_positive_definite() {
            return Err(Error::InvalidParameter(format!(
                "fracture {id}: transmissivity must be positive definite"
            )));
        }
        let frame = Frame::from_polygon(&vertices)?;
        let local = vertices
            .iter()
            .map(|&p| frame.to_local(p, eps))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidGeometry(format!("fracture {id} is not planar: {e}")))?;
        let polygon =
            ConvexPolygon2::new(local, eps).map_err(|e| Error::InvalidGeometry(format!("fracture {id}: {e}")))?;
        Ok(Self {
            id,
            vertices,
            frame,
            polygon,
            permeability,
            edge_bc,
            source: ScalarField::zero(),
        })
    }

    /// Fracture with unit transmissivity and the same condition on every edge.
    pub fn uniform(id: usize, vertices: Vec<Vec3<T>>, bc: BoundaryCondition<T>, eps: T) -> Result<Self> {
        let n = vertices.len();
        Self::new(id, vertices, Tensor2::isotropic(T::one()), vec![bc; n], eps)
    }

    pub fn with_source(mut self, source: ScalarField<T>) -> Self {
        self.source = source;
        self
    }

    pub fn area(&self) -> T {
        self.polygon.area()
    }

    pub fn has_dirichlet(&self) -> bool {
        self.edge_bc.iter().any(BoundaryCondition::is_dirichlet)
    }

    /// Outward in-plane unit normal of edge `k`.
    pub fn edge_normal(&self, k: usize) -> Vec2<T> {
        let v = self.polygon.vertices();
        let (a, b) = (v[k], v[(k + 1) % v.len()]);
        -(b - a).perp().normalized()
    }
}

/// Intersection segment of exactly two fractures.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace<T> {
    pub id: usize,
    pub endpoints: [Vec3<T>; 2],
    /// Indices `(i, j)` into the network's fracture list, `i < j`.
    pub fractures: (usize, usize),
    /// Unit in-plane normal on each owning fracture, in that fracture's local frame.
    pub normals: [Vec2<T>; 2],
}

impl<T: Scalar> Trace<T> {
    pub fn length(&self) -> T {
        (self.endpoints[1] - self.endpoints[0]).norm()
    }

    pub fn point_at(&self, t: T) -> Vec3<T> {
        self.endpoints[0] + (self.endpoints[1] - self.endpoints[0]) * t
    }

    pub fn involves(&self, fracture: usize) -> bool {
        self.fractures.0 == fracture || self.fractures.1 == fracture
    }

    /// The fracture on the other side of the trace.
    pub fn other(&self, fracture: usize) -> usize {
        if self.fractures.0 == fracture {
            self.fractures.1
        } else {
            self.fractures.0
        }
    }

    /// Endpoints in the local frame of `fracture`.
    pub fn local_endpoints(&self, fracture: &Fracture<T>) -> [Vec2<T>; 2] {
        [
            fracture.frame.project(self.endpoints[0]),
            fracture.frame.project(self.endpoints[1]),
        ]
    }
}

/// Porous block, fractures and their traces.
#[derive(Clone, Debug)]
pub struct FractureNetwork<T> {
    pub domain: PorousDomain<T>,
    pub fractures: Vec<Fracture<T>>,
    pub traces: Vec<Trace<T>>,
    eps: T,
}

impl<T: Scalar> FractureNetwork<T> {
    /// Validates containment and computes traces.
    pub fn new(domain: PorousDomain<T>, fractures: Vec<Fracture<T>>) -> Result<Self> {
        let eps = domain.eps_geo();
        for f in &fractures {
            if let Some(p) = f.vertices.iter().find(|&&p| !domain.contains(p, eps)) {
                return Err(Error::InvalidGeometry(format!(
                    "fracture {} vertex {:?} lies outside the domain",
                    f.id, p
                )));
            }
        }
        let traces = super::traces::compute_traces(&fractures, eps)?;
        Ok(Self {
            domain,
            fractures,
            traces,
            eps,
        })
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// Increasing trace indices on fracture `i`.
    pub fn traces_of(&self, i: usize) -> Vec<usize> {
        self.traces
            .iter()
            .enumerate()
            .filter(|(_, t)| t.involves(i))
            .map(|(m, _)| m)
            .collect()
    }

    /// True when the trace graph connects every fracture.
    pub fn is_connected(&self) -> bool {
        let n = self.fractures.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for t in self.traces.iter().filter(|t| t.involves(i)) {
                let j = t.other(i);
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tilted() -> Fracture<f64> {
        let verts = vec![
            Vec3::new(0.1, 0.2, 0.3),
            Vec3::new(0.9, 0.1, 0.5),
            Vec3::new(0.8, 0.9, 0.8),
            Vec3::new(0.2, 0.7, 0.55),
        ];
        // make the fourth vertex coplanar
        let f = Frame::from_polygon(&verts[..3]).unwrap();
        let mut v = verts.clone();
        v[3] = v[3] - f.normal * f.signed_distance(v[3]);
        Fracture::uniform(0, v, BoundaryCondition::insulated(), 1e-12).unwrap()
    }

    #[test]
    fn local_frame_of_horizontal_square() {
        let f = Fracture::uniform(
            0,
            vec![
                Vec3::<f64>::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            BoundaryCondition::insulated(),
            1e-12,
        )
        .unwrap();
        let q = f.frame.to_local(Vec3::new(0.3, 0.7, 0.0), 1e-12).unwrap();
        assert!((q.x - 0.3).abs() < 1e-15 && (q.y - 0.7).abs() < 1e-15);
        assert!(matches!(
            f.frame.to_local(Vec3::new(0.3, 0.7, 0.1), 1e-9),
            Err(Error::OffPlane { .. })
        ));
        assert!((f.edge_normal(0) - Vec2::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn frame_is_orthonormal_isometry() {
        let f = tilted();
        let fr = f.frame;
        assert!((fr.e1.dot(fr.e2)).abs() < 1e-12);
        assert!((fr.e1.norm() - 1.0).abs() < 1e-12);
        assert!((fr.normal.dot(fr.e1)).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut pts = Vec::new();
        let mut max_err: f64 = 0.0;
        for _ in 0..1000 {
            let q = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let p = fr.from_local(q);
            let back = fr.to_local(p, 1e-9).unwrap();
            max_err = max_err.max((back - q).norm() / q.norm().max(1.0));
            max_err = max_err.max((fr.from_local(back) - p).norm() / p.norm().max(1.0));
            pts.push((p, q));
        }
        assert!(max_err < 1e-12, "{max_err}");
        for w in pts.windows(2) {
            let d3 = (w[0].0 - w[1].0).norm();
            let d2 = (w[0].1 - w[1].1).norm();
            assert!((d3 - d2).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_planar_and_bad_bc_count() {
        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.1),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        assert!(Fracture::uniform(0, v.clone(), BoundaryCondition::insulated(), 1e-9).is_err());
        assert!(Fracture::new(0, v, Tensor2::isotropic(1.0), vec![], 1e-9).is_err());
    }

    #[test]
    fn tensor_checks() {
        assert!(Tensor3::<f64>::isotropic(2.0).is_positive_definite());
        let mut t = Tensor3::<f64>::isotropic(1.0);
        t.m[0][1] = 2.0;
        t.m[1][0] = 2.0;
        assert!(!t.is_positive_definite());
        assert!(!Tensor2 {
            xx: 1.0,
            xy: 1.0,
            yy: 1.0
        }
        .is_positive_definite());
    }
}
