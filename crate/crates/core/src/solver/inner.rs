//! Factorizations of `A_D` and of the fracture blocks `A_i`.

use rayon::prelude::*;

use crate::assembly::{Discretization, SystemBlocks};
use crate::error::{Error, Result};
use crate::scalar::norm2;
use crate::sparse::{CsrMatrix, Ordering, SparseCholesky};
use crate::Scalar;

/// Relative residual accepted from an inner direct solve.
pub const DEFAULT_INNER_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct InnerSolvers<T> {
    a_d: SparseCholesky<T>,
    a_f: Vec<SparseCholesky<T>>,
    pub tol: T,
}

/// Solves `a x = r` with one step of iterative refinement if the residual is large.
fn checked_solve<T: Scalar>(a: &CsrMatrix<T>, f: &SparseCholesky<T>, r: &[T], tol: T) -> Result<Vec<T>> {
    let nr = norm2(r);
    if nr == T::zero() {
        return Ok(vec![T::zero(); r.len()]);
    }
    let mut x = f.solve(r);
    let residual = |x: &[T]| -> Vec<T> {
        let ax = a.mul_vec(x);
        r.iter().zip(&ax).map(|(&b, &y)| b - y).collect()
    };
    let mut res = residual(&x);
    if norm2(&res) > tol * nr {
        let dx = f.solve(&res);
        x.iter_mut().zip(&dx).for_each(|(a, &b)| *a = *a + b);
        res = residual(&x);
        let rel = norm2(&res) / nr;
        if rel > tol {
            return Err(Error::InnerSolveFailure {
                residual: rel.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
    }
    Ok(x)
}

impl<T: Scalar> InnerSolvers<T> {
    /// Factors `A_D` and each `A_i` with nested-dissection orderings built from the
    /// node coordinates.
    pub fn new(disc: &Discretization<T>, blocks: &SystemBlocks<T>, tol: T) -> Result<Self> {
        let mut d_coords = vec![[0.0; 3]; blocks.n_hd()];
        for (k, m) in disc.hd_dofs.free.iter().enumerate() {
            if let Some(j) = m {
                d_coords[*j] = disc.tet_mesh.vertices[k].to_array().map(|c| c.as_f64());
            }
        }
        let (a_d, a_f) = rayon::join(
            || SparseCholesky::factor(&blocks.a_d, &Ordering::NestedDissection(d_coords)),
            || {
                (0..blocks.a_f.len())
                    .into_par_iter()
                    .map(|i| {
                        let mut coords = vec![[0.0; 3]; blocks.layout.n_hi[i]];
                        for (k, m) in disc.hf_dofs[i].free.iter().enumerate() {
                            if let Some(j) = m {
                                let p = disc.h_meshes[i].vertices[k];
                                coords[*j] = [p.x.as_f64(), p.y.as_f64(), 0.0];
                            }
                        }
                        SparseCholesky::factor(&blocks.a_f[i], &Ordering::NestedDissection(coords))
                    })
                    .collect::<Result<Vec<_>>>()
            },
        );
        Ok(Self {
            a_d: a_d?,
            a_f: a_f?,
            tol,
        })
    }

    /// Factors using natural orderings (no coordinates needed).
    pub fn from_blocks(blocks: &SystemBlocks<T>, tol: T) -> Result<Self> {
        Ok(Self {
            a_d: SparseCholesky::factor(&blocks.a_d, &Ordering::Natural)?,
            a_f: blocks
                .a_f
                .iter()
                .map(|a| SparseCholesky::factor(a, &Ordering::Natural))
                .collect::<Result<_>>()?,
            tol,
        })
    }

    pub fn solve_d(&self, blocks: &SystemBlocks<T>, r: &[T]) -> Result<Vec<T>> {
        checked_solve(&blocks.a_d, &self.a_d, r, self.tol)
    }

    /// Solves `A_F x = r`, fracture blocks in parallel.
    pub fn solve_f(&self, blocks: &SystemBlocks<T>, r: &[T]) -> Result<Vec<T>> {
        let layout = &blocks.layout;
        let parts = (0..self.a_f.len())
            .into_par_iter()
            .map(|i| {
                let o = layout.hf_offset(i);
                checked_solve(&blocks.a_f[i], &self.a_f[i], &r[o..o + layout.n_hi[i]], self.tol)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(parts.concat())
    }

    pub fn factor_nnz(&self) -> usize {
        self.a_d.factor_nnz() + self.a_f.iter().map(|f| f.factor_nnz()).sum::<usize>()
    }
}
