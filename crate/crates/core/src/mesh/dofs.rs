//! Degree-of-freedom numbering and block layout of the discrete unknowns.

use super::tet::TetMesh;
use super::tri::TriMesh;
use crate::geometry::{point_segment_distance, Fracture, FractureNetwork, PorousDomain};
use crate::Scalar;

/// P1 nodal numbering with Dirichlet nodes eliminated.
#[derive(Clone, Debug)]
pub struct NodalDofs<T> {
    /// Free dof index of each mesh vertex, `None` for Dirichlet nodes.
    pub free: Vec<Option<usize>>,
    pub n_free: usize,
    /// Prescribed value per vertex (zero at free nodes).
    pub fixed: Vec<T>,
}

impl<T: Scalar> NodalDofs<T> {
    fn from_values(values: Vec<Option<T>>) -> Self {
        let mut n_free = 0;
        let free = values
            .iter()
            .map(|v| {
                v.is_none().then(|| {
                    n_free += 1;
                    n_free - 1
                })
            })
            .collect();
        let fixed = values.into_iter().map(|v| v.unwrap_or(T::zero())).collect();
        Self { free, n_free, fixed }
    }

    /// Nodes on box faces with Dirichlet data are fixed.
    pub fn for_tet_mesh(mesh: &TetMesh<T>, domain: &PorousDomain<T>) -> Self {
        let eps = domain.eps_geo();
        let values = mesh
            .vertices
            .iter()
            .map(|&p| {
                domain
                    .faces_of(p, eps)
                    .map(|f| domain.bc(f))
                    .find(|bc| bc.is_dirichlet())
                    .map(|bc| bc.field().eval(p))
            })
            .collect();
        Self::from_values(values)
    }

    /// Nodes on fracture edges with Dirichlet data are fixed.
    pub fn for_fracture(mesh: &TriMesh<T>, fracture: &Fracture<T>, eps: T) -> Self {
        let pv = fracture.polygon.vertices();
        let values = mesh
            .vertices
            .iter()
            .map(|&p| {
                (0..pv.len())
                    .filter(|&e| fracture.edge_bc[e].is_dirichlet())
                    .find(|&e| point_segment_distance(p, pv[e], pv[(e + 1) % pv.len()]) <= eps)
                    .map(|e| fracture.edge_bc[e].field().eval(fracture.frame.from_local(p)))
            })
            .collect();
        Self::from_values(values)
    }

    pub fn n_nodes(&self) -> usize {
        self.free.len()
    }

    /// Scatters free values into a full nodal vector including Dirichlet values.
    pub fn expand(&self, free_values: &[T]) -> Vec<T> {
        self.free
            .iter()
            .zip(&self.fixed)
            .map(|(f, &g)| f.map_or(g, |k| free_values[k]))
            .collect()
    }

    /// Restriction of a full nodal vector to free nodes.
    pub fn restrict(&self, full: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_free];
        for (f, &x) in self.free.iter().zip(full) {
            if let Some(k) = f {
                out[*k] = x;
            }
        }
        out
    }
}

/// Sizes and offsets of the unknown blocks `h = [h_D; h_1..h_N]`, `q = [q_1..q_N]`,
/// `u = [u^1..u^M]` with `u^m = [u_i^m; u_j^m]`, `i < j`, and `w = [q; u]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofLayout {
    pub n_hd: usize,
    pub n_hi: Vec<usize>,
    pub n_qi: Vec<usize>,
    /// Per trace, element counts on the lower- and higher-indexed fracture.
    pub n_um: Vec<[usize; 2]>,
    /// Trace ids of each fracture in increasing order.
    pub traces_of: Vec<Vec<usize>>,
    /// Fracture pair of each trace.
    pub pairs: Vec<(usize, usize)>,
    hf_off: Vec<usize>,
    q_off: Vec<usize>,
    u_off: Vec<usize>,
}

impl DofLayout {
    pub fn new(
        n_hd: usize,
        n_hi: Vec<usize>,
        n_qi: Vec<usize>,
        n_um: Vec<[usize; 2]>,
        pairs: Vec<(usize, usize)>,
    ) -> Self {
        let nf = n_hi.len();
        assert_eq!(n_qi.len(), nf);
        assert_eq!(n_um.len(), pairs.len());
        let prefix = |v: &[usize]| {
            let mut o = vec![0];
            for &x in v {
                o.push(o.last().unwrap() + x);
            }
            o
        };
        let mut traces_of = vec![Vec::new(); nf];
        for (m, &(i, j)) in pairs.iter().enumerate() {
            assert!(i < j && j < nf, "trace {m} has invalid fracture pair ({i}, {j})");
            traces_of[i].push(m);
            traces_of[j].push(m);
        }
        let sizes: Vec<usize> = n_um.iter().map(|s| s[0] + s[1]).collect();
        Self {
            hf_off: prefix(&n_hi),
            q_off: prefix(&n_qi),
            u_off: prefix(&sizes),
            n_hd,
            n_hi,
            n_qi,
            n_um,
            traces_of,
            pairs,
        }
    }

    /// Layout for a network given its meshes and nodal numberings.
    pub fn from_meshes<T: Scalar>(
        network: &FractureNetwork<T>,
        hd: &NodalDofs<T>,
        hf: &[NodalDofs<T>],
        q_meshes: &[TriMesh<T>],
        seg_meshes: &[[super::SegMesh<T>; 2]],
    ) -> Self {
        Self::new(
            hd.n_free,
            hf.iter().map(|d| d.n_free).collect(),
            q_meshes.iter().map(|m| m.n_tris()).collect(),
            seg_meshes
                .iter()
                .map(|s| [s[0].n_elements(), s[1].n_elements()])
                .collect(),
            network.traces.iter().map(|t| t.fractures).collect(),
        )
    }

    pub fn n_fractures(&self) -> usize {
        self.n_hi.len()
    }

    pub fn n_traces(&self) -> usize {
        self.n_um.len()
    }

    pub fn n_hf(&self) -> usize {
        *self.hf_off.last().unwrap()
    }

    pub fn n_h(&self) -> usize {
        self.n_hd + self.n_hf()
    }

    pub fn n_q(&self) -> usize {
        *self.q_off.last().unwrap()
    }

    pub fn n_u(&self) -> usize {
        *self.u_off.last().unwrap()
    }

    pub fn n_w(&self) -> usize {
        self.n_q() + self.n_u()
    }

    /// `N_h + N_q + N_u`.
    pub fn total_unknowns(&self) -> usize {
        self.n_h() + self.n_w()
    }

    /// Offset of `h_i` inside `h_F`.
    pub fn hf_offset(&self, i: usize) -> usize {
        self.hf_off[i]
    }

    pub fn q_offset(&self, i: usize) -> usize {
        self.q_off[i]
    }

    /// Offset of `u^m` inside `u`.
    pub fn um_offset(&self, m: usize) -> usize {
        self.u_off[m]
    }

    /// Which side of trace `m` fracture `i` is (0 for the lower index).
    pub fn side(&self, m: usize, i: usize) -> usize {
        let (a, b) = self.pairs[m];
        if i == a {
            0
        } else {
            assert_eq!(i, b, "fracture {i} not on trace {m}");
            1
        }
    }

    /// Offset of `u_i^m` inside `u`.
    pub fn uim_offset(&self, m: usize, i: usize) -> usize {
        let s = self.side(m, i);
        self.u_off[m] + if s == 0 { 0 } else { self.n_um[m][0] }
    }

    pub fn n_uim(&self, m: usize, i: usize) -> usize {
        self.n_um[m][self.side(m, i)]
    }

    /// `N_{u_i}`: dofs of `u_i`.
    pub fn n_ui(&self, i: usize) -> usize {
        self.traces_of[i].iter().map(|&m| self.n_uim(m, i)).sum()
    }

    /// `N_{u_i}^+`: dofs of `u_i^+`.
    pub fn n_ui_plus(&self, i: usize) -> usize {
        self.traces_of[i]
            .iter()
            .map(|&m| self.n_um[m][0] + self.n_um[m][1])
            .sum()
    }

    /// Indices into `u` selected by `R_i` (`u_i = R_i u`).
    pub fn r_indices(&self, i: usize) -> Vec<usize> {
        self.traces_of[i]
            .iter()
            .flat_map(|&m| {
                let o = self.uim_offset(m, i);
                o..o + self.n_uim(m, i)
            })
            .collect()
    }

    /// Indices into `u` selected by `R_i^+` (`u_i^+ = R_i^+ u`).
    pub fn r_plus_indices(&self, i: usize) -> Vec<usize> {
        self.traces_of[i]
            .iter()
            .flat_map(|&m| {
                let o = self.u_off[m];
                o..o + self.n_um[m][0] + self.n_um[m][1]
            })
            .collect()
    }

    /// Applies the 0/1 gather `x[idx]`.
    pub fn gather<T: Copy>(idx: &[usize], x: &[T]) -> Vec<T> {
        idx.iter().map(|&k| x[k]).collect()
    }

    /// Adds `y` into `out[idx]` (the transpose of [`DofLayout::gather`]).
    pub fn scatter_add<T: Scalar>(idx: &[usize], y: &[T], out: &mut [T]) {
        for (&k, &v) in idx.iter().zip(y) {
            out[k] = out[k] + v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_identities() {
        // three fractures, traces (0,1), (0,2), (1,2)
        let l = DofLayout::new(
            10,
            vec![4, 5, 6],
            vec![2, 3, 1],
            vec![[2, 3], [1, 1], [4, 2]],
            vec![(0, 1), (0, 2), (1, 2)],
        );
        assert_eq!(l.n_hf(), 15);
        assert_eq!(l.n_h(), 25);
        assert_eq!(l.n_q(), 6);
        assert_eq!(l.n_u(), 2 + 3 + 1 + 1 + 4 + 2);
        assert_eq!(l.n_u(), (0..3).map(|i| l.n_ui(i)).sum::<usize>());
        assert_eq!(l.n_ui(1), 3 + 4);
        assert_eq!(l.n_ui_plus(1), 5 + 6);
        assert_eq!(l.r_indices(2), vec![6, 11, 12]);
        assert_eq!(l.r_plus_indices(0), (0..7).collect::<Vec<_>>());
        let mut seen = vec![0; l.n_u()];
        for i in 0..3 {
            for k in l.r_indices(i) {
                seen[k] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }
}
