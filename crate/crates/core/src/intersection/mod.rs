//! Cross-mesh geometry: interface meshes, overlap tables and trace partitions.

mod interface;
mod overlap;
mod slice;
mod trace;

pub use interface::{build_interface_mesh, build_interface_meshes, InterfaceMesh, Traversal};
pub use overlap::{
    polygon_rule, segment_cover, tri_seg_overlap, tri_tri_overlap, CellGrid, OverlapEntry, OverlapTable,
};
pub use slice::{slice_tet, slice_tet_by_fracture, PlaneContact};
pub use trace::{trace_coupling, TraceCoupling, TracePiece};
