//! All meshes, interface meshes and trace partitions of one refinement level.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon2, FractureNetwork};
use crate::intersection::{build_interface_meshes, trace_coupling, CellGrid, InterfaceMesh, TraceCoupling, Traversal};
use crate::mesh::{
    build_box_tet_mesh, build_fracture_tri_mesh, build_trace_mesh, DofLayout, NodalDofs, SegMesh, TetMesh, TriMesh,
};
use crate::Scalar;

/// Target element sizes of the four mesh families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshSizes<T> {
    pub delta_d: T,
    pub delta_f: T,
    pub delta_gamma: T,
    pub delta_s: T,
}

impl<T: Scalar> MeshSizes<T> {
    /// `delta_f = f_ratio * delta_d`; the multiplier meshes are scaled from `delta_f`.
    pub fn from_ratios(delta_d: T, f_ratio: T, gamma_ratio: T, s_ratio: T) -> Self {
        let delta_f = delta_d * f_ratio;
        Self {
            delta_d,
            delta_f,
            delta_gamma: delta_f * gamma_ratio,
            delta_s: delta_f * s_ratio,
        }
    }

    /// Default ratios: fracture mesh twice the tet size, multiplier meshes twice the
    /// fracture mesh size.
    pub fn with_defaults(delta_d: T) -> Self {
        Self::from_ratios(delta_d, T::lit(2.0), T::lit(2.0), T::lit(2.0))
    }
}

#[derive(Clone, Debug)]
pub struct Discretization<T> {
    pub network: FractureNetwork<T>,
    pub tet_mesh: TetMesh<T>,
    /// Meshes carrying `h_i`.
    pub h_meshes: Vec<TriMesh<T>>,
    /// Meshes carrying `q_i`.
    pub q_meshes: Vec<TriMesh<T>>,
    /// Per trace, the meshes of `u_i^m` on the lower- and higher-indexed fracture.
    pub seg_meshes: Vec<[SegMesh<T>; 2]>,
    pub interfaces: Vec<InterfaceMesh<T>>,
    pub hd_dofs: NodalDofs<T>,
    pub hf_dofs: Vec<NodalDofs<T>>,
    pub layout: DofLayout,
    pub couplings: Vec<TraceCoupling<T>>,
    pub mesh_time: Duration,
    pub intersection_time: Duration,
}

impl<T: Scalar> Discretization<T> {
    /// Builds every mesh from target sizes.
    pub fn build(network: FractureNetwork<T>, sizes: MeshSizes<T>) -> Result<Self> {
        let start = Instant::now();
        let tet = build_box_tet_mesh(&network.domain, sizes.delta_d)?;
        let tet_time = start.elapsed();
        let mut d = Self::build_with_tet_mesh(network, tet, sizes)?;
        d.mesh_time += tet_time;
        Ok(d)
    }

    /// Builds fracture and trace meshes around a given tetrahedral mesh.
    pub fn build_with_tet_mesh(network: FractureNetwork<T>, tet_mesh: TetMesh<T>, sizes: MeshSizes<T>) -> Result<Self> {
        let start = Instant::now();
        let eps = network.eps();
        let h_meshes = network
            .fractures
            .par_iter()
            .map(|f| build_fracture_tri_mesh(f, sizes.delta_f, eps))
            .collect::<Result<Vec<_>>>()?;
        let q_meshes = network
            .fractures
            .par_iter()
            .map(|f| build_fracture_tri_mesh(f, sizes.delta_gamma, eps))
            .collect::<Result<Vec<_>>>()?;
        let seg_meshes = network
            .traces
            .iter()
            .map(|t| {
                Ok([
                    build_trace_mesh(t, t.fractures.0, sizes.delta_s)?,
                    build_trace_mesh(t, t.fractures.1, sizes.delta_s)?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        let mut d = Self::new(network, tet_mesh, h_meshes, q_meshes, seg_meshes)?;
        d.mesh_time = start.elapsed() - d.intersection_time;
        Ok(d)
    }

    /// Assembles the level from explicit meshes.
    pub fn new(
        network: FractureNetwork<T>,
        tet_mesh: TetMesh<T>,
        h_meshes: Vec<TriMesh<T>>,
        q_meshes: Vec<TriMesh<T>>,
        seg_meshes: Vec<[SegMesh<T>; 2]>,
    ) -> Result<Self> {
        let nf = network.fractures.len();
        if h_meshes.len() != nf || q_meshes.len() != nf || seg_meshes.len() != network.traces.len() {
            return Err(Error::InvalidParameter("mesh count does not match the network".into()));
        }
        let eps = network.eps();
        let start = Instant::now();
        let interfaces = build_interface_meshes(&tet_mesh, &network, Traversal::Walk)?;
        let h_cells: Vec<Vec<ConvexPolygon2<T>>> = h_meshes
            .iter()
            .map(|m| (0..m.n_tris()).map(|t| m.polygon(t)).collect())
            .collect();
        let grids: Vec<CellGrid> = h_cells.iter().map(|c| CellGrid::new(c)).collect();
        let couplings = network
            .traces
            .par_iter()
            .zip(&seg_meshes)
            .map(|(t, segs)| {
                let (a, b) = t.fractures;
                let (fa, fb) = (&network.fractures[a], &network.fractures[b]);
                trace_coupling(
                    t,
                    [t.local_endpoints(fa), t.local_endpoints(fb)],
                    [&h_cells[a], &h_cells[b]],
                    [&grids[a], &grids[b]],
                    [&segs[0], &segs[1]],
                    eps,
                )
            })
            .collect();
        let intersection_time = start.elapsed();
        let hd_dofs = NodalDofs::for_tet_mesh(&tet_mesh, &network.domain);
        let hf_dofs: Vec<NodalDofs<T>> = h_meshes
            .iter()
            .zip(&network.fractures)
            .map(|(m, f)| NodalDofs::for_fracture(m, f, eps))
            .collect();
        let layout = DofLayout::from_meshes(&network, &hd_dofs, &hf_dofs, &q_meshes, &seg_meshes);
        Ok(Self {
            network,
            tet_mesh,
            h_meshes,
            q_meshes,
            seg_meshes,
            interfaces,
            hd_dofs,
            hf_dofs,
            layout,
            couplings,
            mesh_time: Duration::ZERO,
            intersection_time,
        })
    }

    pub fn n_fractures(&self) -> usize {
        self.network.fractures.len()
    }

    /// Offsets of each fracture's nodes in the full (unreduced) `h_F` numbering.
    pub fn hf_full_offsets(&self) -> Vec<usize> {
        let mut o = vec![0];
        for m in &self.h_meshes {
            o.push(o.last().unwrap() + m.n_vertices());
        }
        o
    }
}
