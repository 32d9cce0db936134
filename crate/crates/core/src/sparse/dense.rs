//! Small dense matrices with an LU solve, used by the monolithic reference solver.

use crate::error::{Error, Result};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let e = &mut self.data[i * self.n + j];
        *e = *e + v;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| crate::scalar::dot(&self.data[i * self.n..(i + 1) * self.n], x))
            .collect()
    }

    /// Gaussian elimination with partial pivoting.
    pub fn lu(mut self) -> Result<DenseLu<T>> {
        let n = self.n;
        let scale = self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tiny = scale * T::epsilon() * T::lit(n.max(1) as f64);
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, self.data[i * n + k].abs()))
                .fold((k, T::zero()), |best, c| if c.1 > best.1 { c } else { best });
            if pv <= tiny {
                return Err(Error::SingularMatrix(k));
            }
            if p != k {
                for j in 0..n {
                    self.data.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let d = self.data[k * n + k];
            for i in k + 1..n {
                let f = self.data[i * n + k] / d;
                if f == T::zero() {
                    continue;
                }
                self.data[i * n + k] = f;
                let (upper, lower) = self.data.split_at_mut(i * n);
                let rk = &upper[k * n + k + 1..k * n + n];
                let ri = &mut lower[k + 1..n];
                for (a, &b) in ri.iter_mut().zip(rk) {
                    *a = *a - f * b;
                }
            }
        }
        Ok(DenseLu { m: self, piv })
    }
}

#[derive(Clone, Debug)]
pub struct DenseLu<T> {
    m: DenseMatrix<T>,
    piv: Vec<usize>,
}

impl<T: Scalar> DenseLu<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.m.n;
        let a = &self.m.data;
        let mut x: Vec<T> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = crate::scalar::dot(&a[i * n..i * n + i], &x[..i]);
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let s = crate::scalar::dot(&a[i * n + i + 1..(i + 1) * n], &x[i + 1..]);
            x[i] = (x[i] - s) / a[i * n + i];
        }
        x
    }
}
