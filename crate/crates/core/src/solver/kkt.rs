//! Direct solution of the full saddle-point system (oracle for small problems).

use crate::assembly::SystemBlocks;
use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, DenseMatrix, TripletBuilder};
use crate::Scalar;

/// Default cap on the dimension of the dense KKT matrix.
pub const DEFAULT_KKT_CAP: usize = 5000;

fn place<T: Scalar>(t: &mut TripletBuilder<T>, m: &CsrMatrix<T>, r0: usize, c0: usize, s: T) {
    for (r, c, v) in m.triplets() {
        t.push(r0 + r, c0 + c, s * v);
    }
}

/// `𝒜 = [[A_D, 0], [−βG_DFᵀ, A_F]]`.
pub fn constraint_matrix<T: Scalar>(b: &SystemBlocks<T>) -> CsrMatrix<T> {
    let (nd, nh) = (b.n_hd(), b.layout.n_h());
    let mut t = TripletBuilder::new(nh, nh);
    place(&mut t, &b.a_d, 0, 0, T::one());
    place(&mut t, &b.a_f_matrix(), nd, nd, T::one());
    place(&mut t, &b.g_df.transpose(), nd, 0, -b.beta);
    t.build()
}

/// `ℬ = [[E, 0], [−D, B]]`.
pub fn control_matrix<T: Scalar>(b: &SystemBlocks<T>) -> CsrMatrix<T> {
    let (nd, nq) = (b.n_hd(), b.n_q());
    let mut t = TripletBuilder::new(b.layout.n_h(), b.n_w());
    place(&mut t, &b.e, 0, 0, T::one());
    place(&mut t, &b.d, nd, 0, -T::one());
    place(&mut t, &b.b, nd, nq, T::one());
    t.build()
}

/// `ℬ⁺ = [[0, 0], [0, −αB⁺]]`.
pub fn cross_matrix<T: Scalar>(b: &SystemBlocks<T>) -> CsrMatrix<T> {
    let mut t = TripletBuilder::new(b.layout.n_h(), b.n_w());
    place(&mut t, &b.b_plus, b.n_hd(), b.n_q(), -b.alpha);
    t.build()
}

/// `𝒞 = [[0, 0], [0, C]]`.
pub fn control_mass<T: Scalar>(b: &SystemBlocks<T>) -> CsrMatrix<T> {
    let nw = b.n_w();
    let mut t = TripletBuilder::new(nw, nw);
    place(&mut t, &b.c, b.n_q(), b.n_q(), T::one());
    t.build()
}

/// Solution of the saddle-point system.
#[derive(Clone, Debug)]
pub struct KktSolution<T> {
    pub h: Vec<T>,
    pub w: Vec<T>,
    pub lambda: Vec<T>,
    /// `‖𝓜x − rhs‖ / ‖rhs‖`.
    pub relative_residual: T,
}

/// Assembles `𝓜 = [[G, ℬ⁺, 𝒜ᵀ], [ℬ⁺ᵀ, 𝒞, −ℬᵀ], [𝒜, −ℬ, 0]]` densely and solves it by LU
/// with right-hand side `[−l_h; −l_w; b]`.
pub fn solve_kkt_direct<T: Scalar>(b: &SystemBlocks<T>, cap: usize) -> Result<KktSolution<T>> {
    let (nh, nw) = (b.layout.n_h(), b.n_w());
    let n = 2 * nh + nw;
    if n > cap {
        return Err(Error::TooLarge { dim: n, cap });
    }
    let a = constraint_matrix(b);
    let bm = control_matrix(b);
    let bp = cross_matrix(b);
    let c = control_mass(b);
    let mut m = DenseMatrix::zeros(n);
    let mut put = |mat: &CsrMatrix<T>, r0: usize, c0: usize, s: T, transpose: bool| {
        for (r, col, v) in mat.triplets() {
            let (r, col) = if transpose { (col, r) } else { (r, col) };
            m.add(r0 + r, c0 + col, s * v);
        }
    };
    let (one, neg) = (T::one(), -T::one());
    put(&b.g, 0, 0, one, false);
    put(&bp, 0, nh, one, false);
    put(&a, 0, nh + nw, one, true);
    put(&bp, nh, 0, one, true);
    put(&c, nh, nh, one, false);
    put(&bm, nh, nh + nw, neg, true);
    put(&a, nh + nw, 0, one, false);
    put(&bm, nh + nw, nh, neg, false);

    let rhs: Vec<T> = b.l_h.iter().chain(&b.l_w).map(|&v| -v).chain(b.rhs()).collect();
    let x = m.clone().lu()?.solve(&rhs);
    let mx = m.mul_vec(&x);
    let res: Vec<T> = mx.iter().zip(&rhs).map(|(&p, &q)| p - q).collect();
    let nr = crate::scalar::norm2(&rhs);
    let relative_residual = if nr > T::zero() {
        crate::scalar::norm2(&res) / nr
    } else {
        crate::scalar::norm2(&res)
    };
    Ok(KktSolution {
        h: x[..nh].to_vec(),
        w: x[nh..nh + nw].to_vec(),
        lambda: x[nh + nw..].to_vec(),
        relative_residual,
    })
}
