//! Sparse and dense linear algebra kernels.

pub mod cholesky;
pub mod csr;
pub mod dense;
pub mod lanczos;
pub mod ordering;

pub use cholesky::SparseCholesky;
pub use csr::{CsrMatrix, TripletBuilder};
pub use dense::{DenseLu, DenseMatrix};
pub use lanczos::ritz_extremes;
pub use ordering::Ordering;
