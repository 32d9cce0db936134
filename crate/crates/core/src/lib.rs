//! Discrete fracture-matrix flow solver based on an optimization coupling of
//! nonconforming matrix and fracture finite element discretizations.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN

pub mod assembly;
pub mod config;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod intersection;
pub mod mesh;
pub mod postprocess;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default working precision.
pub type Real = f64;
pub type Point3 = geometry::Vec3<Real>;
pub type Point2 = geometry::Vec2<Real>;
