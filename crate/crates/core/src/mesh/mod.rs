//! Tetrahedral, triangular and segment meshes plus dof bookkeeping.

mod dofs;
pub mod io;
mod seg;
mod tet;
mod tri;

pub use dofs::{DofLayout, NodalDofs};
pub use seg::{build_trace_mesh, SegMesh};
pub use tet::{
    build_box_tet_mesh, build_box_tet_mesh_with_divisions, divisions, BoundaryFace, TetGeometry, TetMesh, NO_NEIGHBOR,
    TET_FACES,
};
pub use tri::{build_fracture_tri_mesh, build_polygon_tri_mesh, BoundaryEdge, TriGeometry, TriMesh};
