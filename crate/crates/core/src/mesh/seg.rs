//! Segment meshes on traces.

use super::tet::divisions;
use crate::error::{Error, Result};
use crate::geometry::Trace;
use crate::Scalar;

/// Partition of a trace, parametrized by `t` in `[0, 1]` from `endpoints[0]` to
/// `endpoints[1]`, owned by one of the two fractures meeting there.
#[derive(Clone, Debug, PartialEq)]
pub struct SegMesh<T> {
    pub breaks: Vec<T>,
    pub fracture: usize,
    pub trace: usize,
}

pub fn build_trace_mesh<T: Scalar>(trace: &Trace<T>, fracture: usize, delta: T) -> Result<SegMesh<T>> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "trace mesh size must be positive, got {delta}"
        )));
    }
    if !trace.involves(fracture) {
        return Err(Error::InvalidParameter(format!(
            "fracture {fracture} does not own trace {}",
            trace.id
        )));
    }
    Ok(SegMesh::uniform(divisions(trace.length(), delta), fracture, trace.id))
}

impl<T: Scalar> SegMesh<T> {
    pub fn uniform(n: usize, fracture: usize, trace: usize) -> Self {
        let n = n.max(1);
        let nn = T::from_usize_lossy(n);
        let breaks = (0..=n)
            .map(|k| if k == n { T::one() } else { T::from_usize_lossy(k) / nn })
            .collect();
        Self {
            breaks,
            fracture,
            trace,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn element(&self, k: usize) -> (T, T) {
        (self.breaks[k], self.breaks[k + 1])
    }

    /// Element containing parameter `t` (clamped to the mesh).
    pub fn locate(&self, t: T) -> usize {
        let k = self.breaks.partition_point(|&b| b <= t);
        k.saturating_sub(1).min(self.n_elements() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Vec2, Vec3};

    fn unit_trace() -> Trace<f64> {
        Trace {
            id: 0,
            endpoints: [Vec3::zero(), Vec3::new(1.0, 0.0, 0.0)],
            fractures: (0, 1),
            normals: [Vec2::new(0.0, 1.0), Vec2::new(0.0, 1.0)],
        }
    }

    #[test]
    fn ceil_division() {
        let m = build_trace_mesh(&unit_trace(), 0, 0.3).unwrap();
        assert_eq!(m.breaks, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = build_trace_mesh(&unit_trace(), 1, 2.0).unwrap();
        assert_eq!(m.breaks, vec![0.0, 1.0]);
        assert!(build_trace_mesh(&unit_trace(), 2, 0.3).is_err());
    }

    #[test]
    fn locate_elements() {
        let m = SegMesh::<f64>::uniform(4, 0, 0);
        assert_eq!(m.locate(0.0), 0);
        assert_eq!(m.locate(0.3), 1);
        assert_eq!(m.locate(1.0), 3);
    }
}
