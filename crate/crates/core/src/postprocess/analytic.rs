//! Closed-form reference solutions.

use std::sync::Arc;

use crate::geometry::{Fracture, Vec2, Vec3};
use crate::Scalar;

type ValueFn<T> = Arc<dyn Fn(Vec3<T>) -> T + Send + Sync>;
type GradFn<T> = Arc<dyn Fn(Vec3<T>) -> Vec3<T> + Send + Sync>;

/// A head field with its gradient. Fracture values are traces of the 3D field and
/// fracture gradients its tangential part.
#[derive(Clone)]
pub struct AnalyticSolution<T> {
    pub value: ValueFn<T>,
    pub gradient: GradFn<T>,
}

impl<T: Scalar> AnalyticSolution<T> {
    pub fn new(
        value: impl Fn(Vec3<T>) -> T + Send + Sync + 'static,
        gradient: impl Fn(Vec3<T>) -> Vec3<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    pub fn eval(&self, p: Vec3<T>) -> T {
        (self.value)(p)
    }

    pub fn grad(&self, p: Vec3<T>) -> Vec3<T> {
        (self.gradient)(p)
    }

    pub fn fracture_value(&self, f: &Fracture<T>, p: Vec2<T>) -> T {
        self.eval(f.frame.from_local(p))
    }

    pub fn fracture_gradient(&self, f: &Fracture<T>, p: Vec2<T>) -> Vec2<T> {
        f.frame.project_direction(self.grad(f.frame.from_local(p)))
    }
}

impl<T> std::fmt::Debug for AnalyticSolution<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("AnalyticSolution")
    }
}
