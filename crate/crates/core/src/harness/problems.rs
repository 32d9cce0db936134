//! Single-fracture benchmark problems on the unit cube with a fracture at `z = 0`.

use crate::error::Result;
use crate::geometry::{
    BoundaryCondition, BoxFace, Fracture, FractureNetwork, PorousDomain, ScalarField, Tensor3, Vec3,
};
use crate::postprocess::AnalyticSolution;
use crate::Scalar;

/// A network with its reference solution and coupling parameters.
#[derive(Clone, Debug)]
pub struct ProblemSetup<T> {
    pub network: FractureNetwork<T>,
    pub exact: AnalyticSolution<T>,
    pub alpha: T,
    pub beta: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Benchmark {
    /// `h = (x² + y²)/4 + |z|/2`, kinked across the fracture.
    Kinked,
    /// `h = (x² − y²)/2 + z`, smooth.
    Smooth,
}

impl Benchmark {
    pub fn from_number(n: u32) -> Option<Self> {
        match n {
            1 => Some(Benchmark::Kinked),
            2 => Some(Benchmark::Smooth),
            _ => None,
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "problem1" => Some(Benchmark::Kinked),
            "problem2" => Some(Benchmark::Smooth),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Kinked => "problem1",
            Benchmark::Smooth => "problem2",
        }
    }

    pub fn exact<T: Scalar>(self) -> AnalyticSolution<T> {
        let half = T::lit(0.5);
        let quarter = T::lit(0.25);
        match self {
            Benchmark::Kinked => AnalyticSolution::new(
                move |p: Vec3<T>| quarter * (p.x * p.x + p.y * p.y) + half * p.z.abs(),
                move |p: Vec3<T>| Vec3::new(half * p.x, half * p.y, half * p.z.signum()),
            ),
            Benchmark::Smooth => AnalyticSolution::new(
                move |p: Vec3<T>| half * (p.x * p.x - p.y * p.y) + p.z,
                |p: Vec3<T>| Vec3::new(p.x, -p.y, T::one()),
            ),
        }
    }

    /// Volumetric source `f = −Δh`.
    pub fn matrix_source<T: Scalar>(self) -> T {
        match self {
            Benchmark::Kinked => -T::one(),
            Benchmark::Smooth => T::zero(),
        }
    }

    /// Fracture source such that `−Δ_τ h = f_F + [[∂h/∂n]]`.
    pub fn fracture_source<T: Scalar>(self) -> T {
        match self {
            // −Δ_τ h = −1 and the normal-derivative jump is 1
            Benchmark::Kinked => T::lit(-2.0),
            Benchmark::Smooth => T::zero(),
        }
    }

    pub fn setup<T: Scalar>(self, alpha: T, beta: T) -> Result<ProblemSetup<T>> {
        let exact = self.exact::<T>();
        let value = |e: &AnalyticSolution<T>| {
            let e = e.clone();
            BoundaryCondition::Dirichlet(ScalarField::function(move |p| e.eval(p)))
        };
        let flux = |e: &AnalyticSolution<T>, n: Vec3<T>| {
            let e = e.clone();
            BoundaryCondition::Neumann(ScalarField::function(move |p| e.grad(p).dot(n)))
        };
        let ey = Vec3::new(T::zero(), T::one(), T::zero());
        let mut face_bc: [BoundaryCondition<T>; 6] = std::array::from_fn(|_| value(&exact));
        face_bc[BoxFace::YMin as usize] = flux(&exact, -ey);
        face_bc[BoxFace::YMax as usize] = flux(&exact, ey);
        let half = T::lit(0.5);
        let domain = PorousDomain::new(
            Vec3::new(T::zero(), T::zero(), -half),
            Vec3::new(T::one(), T::one(), half),
            Tensor3::isotropic(T::one()),
            face_bc,
            ScalarField::Constant(self.matrix_source()),
        )?;
        let (o, l) = (T::zero(), T::one());
        // edges: y = 0, x = 1, y = 1, x = 0
        let vertices = vec![
            Vec3::new(o, o, o),
            Vec3::new(l, o, o),
            Vec3::new(l, l, o),
            Vec3::new(o, l, o),
        ];
        let edge_bc = vec![flux(&exact, -ey), value(&exact), flux(&exact, ey), value(&exact)];
        let fracture = Fracture::new(
            0,
            vertices,
            crate::geometry::Tensor2::isotropic(T::one()),
            edge_bc,
            domain.eps_geo(),
        )?
        .with_source(ScalarField::Constant(self.fracture_source()));
        let network = FractureNetwork::new(domain, vec![fracture])?;
        Ok(ProblemSetup {
            network,
            exact,
            alpha,
            beta,
        })
    }
}

pub fn problem1_setup<T: Scalar>() -> Result<ProblemSetup<T>> {
    Benchmark::Kinked.setup(T::one(), T::one())
}

pub fn problem2_setup<T: Scalar>() -> Result<ProblemSetup<T>> {
    Benchmark::Smooth.setup(T::one(), T::one())
}
