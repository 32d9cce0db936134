//! Planar fractures, local frames, traces and convex clipping kernels.

mod fracture;
mod polygon;
mod traces;
mod vector;

pub use fracture::{
    BoundaryCondition, BoxFace, Fracture, FractureNetwork, Frame, PorousDomain, ScalarField, Tensor2, Tensor3, Trace,
};
pub use polygon::{
    clip_polygon_halfplane, clip_segment_params, intersect_convex_polygons, intersect_polygon_segment,
    point_segment_distance, touches, ConvexPolygon2, HalfPlane, Segment2,
};
pub use traces::{compute_traces, intersect_fractures, trace_halfplane};
pub use vector::{orient2d, orient3d, Vec2, Vec3};
