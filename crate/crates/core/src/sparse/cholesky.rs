//! Up-looking sparse Cholesky factorization `P A Pᵀ = L Lᵀ`.

use super::csr::CsrMatrix;
use super::ordering::{inverse_permutation, Ordering};
use crate::error::{Error, Result};
use crate::Scalar;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct SparseCholesky<T> {
    n: usize,
    perm: Vec<usize>,
    l_ptr: Vec<usize>,
    l_row: Vec<usize>,
    l_val: Vec<T>,
}

impl<T: Scalar> SparseCholesky<T> {
    /// Factors a symmetric positive definite matrix; only the pattern and values of the
    /// upper triangle of the permuted matrix are read.
    pub fn factor(a: &CsrMatrix<T>, ordering: &Ordering) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "Cholesky needs a square matrix, got {}x{}",
                n,
                a.ncols()
            )));
        }
        let perm = ordering.permutation(&a.adjacency());
        let iperm = inverse_permutation(&perm);

        // Upper triangle of P A Pᵀ in compressed columns. Row `perm[k]` of the symmetric
        // input doubles as column k.
        let mut c_ptr = Vec::with_capacity(n + 1);
        let mut c_row = Vec::with_capacity(a.nnz() / 2 + n);
        let mut c_val = Vec::with_capacity(a.nnz() / 2 + n);
        c_ptr.push(0);
        for &old in &perm {
            let k = c_ptr.len() - 1;
            let (cols, vals) = a.row(old);
            for (&j, &v) in cols.iter().zip(vals) {
                let i = iperm[j];
                if i <= k {
                    c_row.push(i);
                    c_val.push(v);
                }
            }
            c_ptr.push(c_row.len());
        }

        let parent = etree(n, &c_ptr, &c_row);

        // Column counts by a symbolic sweep of the row patterns.
        let mut flag = vec![NONE; n];
        let mut stack = Vec::new();
        let mut pattern = vec![0usize; n];
        let mut counts = vec![1usize; n];
        for k in 0..n {
            let top = ereach(k, &c_ptr, &c_row, &parent, &mut flag, &mut stack, &mut pattern);
            for &i in &pattern[top..] {
                counts[i] += 1;
            }
        }
        let mut l_ptr = vec![0usize; n + 1];
        for k in 0..n {
            l_ptr[k + 1] = l_ptr[k] + counts[k];
        }
        let nnz = l_ptr[n];
        let mut l_row = vec![0usize; nnz];
        let mut l_val = vec![T::zero(); nnz];
        let mut next: Vec<usize> = l_ptr[..n].to_vec();
        let mut x = vec![T::zero(); n];
        flag.iter_mut().for_each(|f| *f = NONE);

        for k in 0..n {
            let top = ereach(k, &c_ptr, &c_row, &parent, &mut flag, &mut stack, &mut pattern);
            for p in c_ptr[k]..c_ptr[k + 1] {
                x[c_row[p]] = x[c_row[p]] + c_val[p];
            }
            let mut d = x[k];
            x[k] = T::zero();
            for &i in &pattern[top..] {
                let lki = x[i] / l_val[l_ptr[i]];
                x[i] = T::zero();
                for p in l_ptr[i] + 1..next[i] {
                    x[l_row[p]] = x[l_row[p]] - l_val[p] * lki;
                }
                d = d - lki * lki;
                let p = next[i];
                next[i] += 1;
                l_row[p] = k;
                l_val[p] = lki;
            }
            if d <= T::zero() || !d.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    pivot: perm[k],
                    value: d.as_f64(),
                });
            }
            let p = next[k];
            next[k] += 1;
            l_row[p] = k;
            l_val[p] = d.sqrt();
        }
        Ok(Self {
            n,
            perm,
            l_ptr,
            l_row,
            l_val,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn factor_nnz(&self) -> usize {
        self.l_val.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n, "right-hand side length mismatch");
        let mut y: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..self.n {
            let p0 = self.l_ptr[j];
            y[j] = y[j] / self.l_val[p0];
            let yj = y[j];
            for p in p0 + 1..self.l_ptr[j + 1] {
                let i = self.l_row[p];
                y[i] = y[i] - self.l_val[p] * yj;
            }
        }
        for j in (0..self.n).rev() {
            let p0 = self.l_ptr[j];
            let mut s = y[j];
            for p in p0 + 1..self.l_ptr[j + 1] {
                s = s - self.l_val[p] * y[self.l_row[p]];
            }
            y[j] = s / self.l_val[p0];
        }
        let mut x = vec![T::zero(); self.n];
        for (k, &old) in self.perm.iter().enumerate() {
            x[old] = y[k];
        }
        x
    }
}

/// Elimination tree of the matrix whose upper triangle is given by columns.
fn etree(n: usize, c_ptr: &[usize], c_row: &[usize]) -> Vec<usize> {
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for k in 0..n {
        for &r in &c_row[c_ptr[k]..c_ptr[k + 1]] {
            let mut i = r;
            while i != NONE && i < k {
                let inext = ancestor[i];
                ancestor[i] = k;
                if inext == NONE {
                    parent[i] = k;
                }
                i = inext;
            }
        }
    }
    parent
}

/// Nonzero pattern of row k of L, written to `pattern[top..]` in topological order.
fn ereach(
    k: usize,
    c_ptr: &[usize],
    c_row: &[usize],
    parent: &[usize],
    flag: &mut [usize],
    stack: &mut Vec<usize>,
    pattern: &mut [usize],
) -> usize {
    let n = parent.len();
    let mut top = n;
    flag[k] = k;
    for &r in &c_row[c_ptr[k]..c_ptr[k + 1]] {
        if r > k {
            continue;
        }
        let mut i = r;
        stack.clear();
        while flag[i] != k {
            stack.push(i);
            flag[i] = k;
            i = parent[i];
        }
        while let Some(v) = stack.pop() {
            top -= 1;
            pattern[top] = v;
        }
    }
    top
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_2d(m: usize) -> (CsrMatrix<f64>, Vec<[f64; 3]>) {
        let idx = |i: usize, j: usize| i * m + j;
        let mut t = Vec::new();
        let mut coords = vec![[0.0; 3]; m * m];
        for i in 0..m {
            for j in 0..m {
                coords[idx(i, j)] = [i as f64, j as f64, 0.0];
                t.push((idx(i, j), idx(i, j), 4.0));
                if i + 1 < m {
                    t.push((idx(i, j), idx(i + 1, j), -1.0));
                    t.push((idx(i + 1, j), idx(i, j), -1.0));
                }
                if j + 1 < m {
                    t.push((idx(i, j), idx(i, j + 1), -1.0));
                    t.push((idx(i, j + 1), idx(i, j), -1.0));
                }
            }
        }
        (CsrMatrix::from_triplets(m * m, m * m, t), coords)
    }

    #[test]
    fn solves_laplacian_with_both_orderings() {
        let (a, coords) = laplacian_2d(20);
        let x_true: Vec<f64> = (0..a.nrows()).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x_true);
        for ord in [Ordering::Natural, Ordering::NestedDissection(coords)] {
            let f = SparseCholesky::factor(&a, &ord).unwrap();
            let x = f.solve(&b);
            let err = x.iter().zip(&x_true).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "{err}");
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(
            SparseCholesky::factor(&a, &Ordering::Natural),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
