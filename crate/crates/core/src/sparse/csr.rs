use std::io::Write;

use crate::Scalar;

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

/// Coordinate-format accumulator; duplicates are summed on conversion.
#[derive(Clone, Debug)]
pub struct TripletBuilder<T> {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> TripletBuilder<T> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.nrows && j < self.ncols, "({i},{j}) out of bounds");
        self.entries.push((i, j, v));
    }

    pub fn append(&mut self, other: TripletBuilder<T>) {
        self.entries.extend(other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(self) -> CsrMatrix<T> {
        CsrMatrix::from_triplets(self.nrows, self.ncols, self.entries)
    }
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    /// Sums duplicates and drops entries below 1e-300 in magnitude.
    pub fn from_triplets(nrows: usize, ncols: usize, mut entries: Vec<(usize, usize, T)>) -> Self {
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let tiny = T::lit(1e-300);
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut k = 0;
        while k < entries.len() {
            let (i, j, mut v) = entries[k];
            k += 1;
            while k < entries.len() && entries[k].0 == i && entries[k].1 == j {
                v = v + entries[k].2;
                k += 1;
            }
            if v.abs() > tiny {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => T::zero(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, x))
        })
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        self.mul_vec_add(T::one(), x, &mut y);
        y
    }

    /// `y += alpha A x`
    pub fn mul_vec_add(&self, alpha: T, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols, "matvec dimension mismatch");
        assert_eq!(y.len(), self.nrows, "matvec dimension mismatch");
        for (i, yi) in y.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            let s = c.iter().zip(v).fold(T::zero(), |acc, (&j, &a)| acc + a * x[j]);
            *yi = *yi + alpha * s;
        }
    }

    /// `y = A^T x`
    pub fn mul_vec_t(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.ncols];
        self.mul_vec_t_add(T::one(), x, &mut y);
        y
    }

    /// `y += alpha A^T x`
    pub fn mul_vec_t_add(&self, alpha: T, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.nrows, "matvec dimension mismatch");
        assert_eq!(y.len(), self.ncols, "matvec dimension mismatch");
        for (i, &xi) in x.iter().enumerate() {
            if xi == T::zero() {
                continue;
            }
            let (c, v) = self.row(i);
            let s = alpha * xi;
            for (&j, &a) in c.iter().zip(v) {
                y[j] = y[j] + a * s;
            }
        }
    }

    /// `x^T A x`
    pub fn quad_form(&self, x: &[T]) -> T {
        crate::scalar::dot(x, &self.mul_vec(x))
    }

    /// `x^T A y`
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        crate::scalar::dot(x, &self.mul_vec(y))
    }

    pub fn transpose(&self) -> Self {
        let entries = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, entries)
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v = *v * s);
        m
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: T, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape());
        let entries = self
            .triplets()
            .chain(other.triplets().map(|(i, j, v)| (i, j, v * s)))
            .collect();
        Self::from_triplets(self.nrows, self.ncols, entries)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Symmetry check relative to the largest entry.
    pub fn is_symmetric(&self, rel_tol: T) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        let tol = rel_tol * self.max_abs();
        self.triplets().all(|(i, j, v)| (v - self.get(j, i)).abs() <= tol)
    }

    /// Re-indexes rows and columns through `row_map`/`col_map` (full index to reduced
    /// index); entries mapped to `None` are dropped.
    pub fn restrict(&self, row_map: &[Option<usize>], nrows: usize, col_map: &[Option<usize>], ncols: usize) -> Self {
        let entries = self
            .triplets()
            .filter_map(|(i, j, v)| Some((row_map[i]?, col_map[j]?, v)))
            .collect();
        Self::from_triplets(nrows, ncols, entries)
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    /// Adjacency lists of the off-diagonal pattern.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.nrows)
            .map(|i| self.row(i).0.iter().copied().filter(|&j| j != i).collect())
            .collect()
    }

    /// Writes the matrix in Matrix Market coordinate format (1-based indices).
    pub fn write_matrix_market(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v.as_f64())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix<f64> {
        CsrMatrix::from_triplets(
            3,
            3,
            vec![
                (0, 0, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 1, 2.0),
                (2, 2, 1.0),
                (0, 0, 1.0),
                (2, 1, 0.0),
            ],
        )
    }

    #[test]
    fn triplets_are_summed_and_zeros_dropped() {
        let a = sample();
        assert_eq!(a.nnz(), 5);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(2, 1), 0.0);
        assert!(a.is_symmetric(1e-12));
    }

    #[test]
    fn matvec_and_transpose() {
        let a = CsrMatrix::from_triplets(2, 3, vec![(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 3.0]);
        assert_eq!(a.mul_vec_t(&[1.0, 2.0]), vec![1.0, 6.0, 2.0]);
        assert_eq!(a.transpose().mul_vec(&[1.0, 2.0]), vec![1.0, 6.0, 2.0]);
    }

    #[test]
    fn matrix_market_header() {
        let mut out = Vec::new();
        sample().write_matrix_market(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("%%MatrixMarket matrix coordinate real general"));
        assert_eq!(lines.next(), Some("3 3 5"));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn restriction_drops_unmapped() {
        let a = sample();
        let map = [Some(0), None, Some(1)];
        let r = a.restrict(&map, 2, &map, 2);
        assert_eq!(r.to_dense(), vec![vec![3.0, 0.0], vec![0.0, 1.0]]);
    }
}
