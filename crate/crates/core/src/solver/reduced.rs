//! Matrix-free application of the reduced Hessian and the reduced gradient.

use rayon::prelude::*;

use super::inner::InnerSolvers;
use crate::assembly::SystemBlocks;
use crate::error::Result;
use crate::scalar::dot;
use crate::Scalar;

/// Operators of the problem restricted to the control `w = [q; u]`.
///
/// With `M = 𝒜⁻¹ℬ`, the reduced functional is `wᵀ𝒢w + 2 gᵀw + const` where
/// `𝒢 = MᵀGM + 𝒞 + ℬ⁺ᵀM + Mᵀℬ⁺`.
pub struct ReducedProblem<'a, T> {
    pub blocks: &'a SystemBlocks<T>,
    pub inner: &'a InnerSolvers<T>,
}

fn add_into<T: Scalar>(y: &mut [T], x: &[T]) {
    y.iter_mut().zip(x).for_each(|(a, &b)| *a = *a + b);
}

impl<'a, T: Scalar> ReducedProblem<'a, T> {
    pub fn new(blocks: &'a SystemBlocks<T>, inner: &'a InnerSolvers<T>) -> Self {
        Self { blocks, inner }
    }

    fn split_h<'b>(&self, h: &'b [T]) -> (&'b [T], &'b [T]) {
        h.split_at(self.blocks.n_hd())
    }

    fn split_w<'b>(&self, w: &'b [T]) -> (&'b [T], &'b [T]) {
        w.split_at(self.blocks.n_q())
    }

    /// `x = 𝒜⁻¹ r`, block forward substitution.
    pub fn solve_a(&self, r: &[T]) -> Result<Vec<T>> {
        let (r_d, r_f) = self.split_h(r);
        let x_d = self.inner.solve_d(self.blocks, r_d)?;
        let mut rhs = r_f.to_vec();
        self.blocks.g_df.mul_vec_t_add(self.blocks.beta, &x_d, &mut rhs);
        let x_f = self.inner.solve_f(self.blocks, &rhs)?;
        Ok([x_d, x_f].concat())
    }

    /// `x = 𝒜⁻ᵀ r`, block backward substitution.
    pub fn solve_a_t(&self, r: &[T]) -> Result<Vec<T>> {
        let (r_d, r_f) = self.split_h(r);
        let x_f = self.inner.solve_f(self.blocks, r_f)?;
        let mut rhs = r_d.to_vec();
        self.blocks.g_df.mul_vec_add(self.blocks.beta, &x_f, &mut rhs);
        let x_d = self.inner.solve_d(self.blocks, &rhs)?;
        Ok([x_d, x_f].concat())
    }

    /// `ℬ w = [E q; −D q + B u]`.
    pub fn apply_b(&self, w: &[T]) -> Vec<T> {
        let (q, u) = self.split_w(w);
        let b = self.blocks;
        let top = b.e.mul_vec(q);
        let mut bot = b.b.mul_vec(u);
        b.d.mul_vec_add(-T::one(), q, &mut bot);
        [top, bot].concat()
    }

    /// `ℬᵀ λ = [Eᵀλ_D − Dᵀλ_F; Bᵀλ_F]`.
    pub fn apply_b_t(&self, lambda: &[T]) -> Vec<T> {
        let (l_d, l_f) = self.split_h(lambda);
        let b = self.blocks;
        let mut top = b.e.mul_vec_t(l_d);
        b.d.mul_vec_t_add(-T::one(), l_f, &mut top);
        let bot = b.b.mul_vec_t(l_f);
        [top, bot].concat()
    }

    /// `ℬ⁺ w = [0; −α B⁺ u]`.
    pub fn apply_b_plus(&self, w: &[T]) -> Vec<T> {
        let (_, u) = self.split_w(w);
        let mut out = vec![T::zero(); self.blocks.layout.n_h()];
        self.blocks
            .b_plus
            .mul_vec_add(-self.blocks.alpha, u, &mut out[self.blocks.n_hd()..]);
        out
    }

    /// `ℬ⁺ᵀ h = [0; −α B⁺ᵀ h_F]`.
    pub fn apply_b_plus_t(&self, h: &[T]) -> Vec<T> {
        let (_, h_f) = self.split_h(h);
        let mut out = vec![T::zero(); self.blocks.n_w()];
        let nq = self.blocks.n_q();
        self.blocks
            .b_plus
            .mul_vec_t_add(-self.blocks.alpha, h_f, &mut out[nq..]);
        out
    }

    /// `𝒞 w = [0; C u]`.
    pub fn apply_c(&self, w: &[T]) -> Vec<T> {
        let (_, u) = self.split_w(w);
        let mut out = vec![T::zero(); self.blocks.n_q()];
        out.extend(self.blocks.c.mul_vec(u));
        out
    }

    /// Second half of a Hessian application given `h̄ = 𝒜⁻¹ℬd`:
    /// `y = ℬᵀ𝒜⁻ᵀ(G h̄ + ℬ⁺d) + 𝒞d + ℬ⁺ᵀh̄`.
    fn finish(&self, d: &[T], h_bar: &[T], adjoint: impl FnOnce(&[T]) -> Result<Vec<T>>) -> Result<Vec<T>> {
        let mut r = self.blocks.g.mul_vec(h_bar);
        add_into(&mut r, &self.apply_b_plus(d));
        let lambda = adjoint(&r)?;
        let mut y = self.apply_b_t(&lambda);
        add_into(&mut y, &self.apply_c(d));
        add_into(&mut y, &self.apply_b_plus_t(h_bar));
        Ok(y)
    }

    /// `y = 𝒢 d`.
    pub fn apply_hessian(&self, d: &[T]) -> Result<Vec<T>> {
        let h_bar = self.solve_a(&self.apply_b(d))?;
        self.finish(d, &h_bar, |r| self.solve_a_t(r))
    }

    /// Gradient offset `g = ℬᵀ𝒜⁻ᵀ(G c + l_h) + ℬ⁺ᵀc + l_w` and constant term
    /// `cᵀGc + 2 l_hᵀc + c0`, with `c = 𝒜⁻¹ b`.
    pub fn linear_terms(&self) -> Result<(Vec<T>, T)> {
        let b = self.blocks;
        let c = self.solve_a(&b.rhs())?;
        let gc = b.g.mul_vec(&c);
        let constant = dot(&c, &gc) + T::lit(2.0) * dot(&b.l_h, &c) + b.c0;
        let mut r = gc;
        add_into(&mut r, &b.l_h);
        let lambda = self.solve_a_t(&r)?;
        let mut g = self.apply_b_t(&lambda);
        add_into(&mut g, &self.apply_b_plus_t(&c));
        add_into(&mut g, &b.l_w);
        Ok((g, constant))
    }

    /// State `h = 𝒜⁻¹(ℬw + b)`.
    pub fn state(&self, w: &[T]) -> Result<Vec<T>> {
        let mut r = self.apply_b(w);
        add_into(&mut r, &self.blocks.rhs());
        self.solve_a(&r)
    }

    /// Multiplier `λ = −𝒜⁻ᵀ(G h + ℬ⁺w + l_h)`.
    pub fn multiplier(&self, h: &[T], w: &[T]) -> Result<Vec<T>> {
        let mut r = self.blocks.g.mul_vec(h);
        add_into(&mut r, &self.apply_b_plus(w));
        add_into(&mut r, &self.blocks.l_h);
        Ok(self.solve_a_t(&r)?.into_iter().map(|v| -v).collect())
    }

    /// Residuals `(‖𝒜h − ℬw − b‖, ‖b‖)` of the constraint equations.
    pub fn constraint_residual(&self, h: &[T], w: &[T]) -> (T, T) {
        let b = self.blocks;
        let (h_d, h_f) = self.split_h(h);
        let mut r_d = b.a_d.mul_vec(h_d);
        let mut r_f = b.a_f_matrix().mul_vec(h_f);
        b.g_df.mul_vec_t_add(-b.beta, h_d, &mut r_f);
        r_d.append(&mut r_f);
        let bw = self.apply_b(w);
        let rhs = b.rhs();
        let res: Vec<T> = r_d.iter().zip(&bw).zip(&rhs).map(|((&a, &c), &f)| a - c - f).collect();
        (crate::scalar::norm2(&res), crate::scalar::norm2(&rhs))
    }
}

/// Hessian application with the matrix-to-fracture coupling lagged by one call.
///
/// The fracture solves use `β G_DFᵀ h̄_D` from the previous call, and the matrix adjoint
/// solve uses the previous fracture adjoint, so `A_D` and the `A_i` are solved
/// concurrently. Exact when `β = 0`.
pub struct LaggedHessian<'p, 'a, T> {
    problem: &'p ReducedProblem<'a, T>,
    prev_h_d: Vec<T>,
    prev_l_f: Vec<T>,
}

impl<'p, 'a, T: Scalar> LaggedHessian<'p, 'a, T> {
    pub fn new(problem: &'p ReducedProblem<'a, T>) -> Self {
        let b = problem.blocks;
        Self {
            problem,
            prev_h_d: vec![T::zero(); b.n_hd()],
            prev_l_f: vec![T::zero(); b.n_hf()],
        }
    }

    pub fn apply(&mut self, d: &[T]) -> Result<Vec<T>> {
        let p = self.problem;
        let b = p.blocks;
        let inner = p.inner;
        let bd = p.apply_b(d);
        let (r_d, r_f) = bd.split_at(b.n_hd());
        let mut rhs_f = r_f.to_vec();
        b.g_df.mul_vec_t_add(b.beta, &self.prev_h_d, &mut rhs_f);
        let (h_d, h_f) = rayon::join(|| inner.solve_d(b, r_d), || inner.solve_f(b, &rhs_f));
        let h_bar = [h_d?, h_f?].concat();
        self.prev_h_d = h_bar[..b.n_hd()].to_vec();

        let prev_l_f = &self.prev_l_f;
        let mut new_l_f = Vec::new();
        let y = p.finish(d, &h_bar, |r| {
            let (r_d, r_f) = r.split_at(b.n_hd());
            let mut rhs_d = r_d.to_vec();
            b.g_df.mul_vec_add(b.beta, prev_l_f, &mut rhs_d);
            let (l_d, l_f) = rayon::join(|| inner.solve_d(b, &rhs_d), || inner.solve_f(b, r_f));
            let l_f = l_f?;
            new_l_f = l_f.clone();
            Ok([l_d?, l_f].concat())
        })?;
        self.prev_l_f = new_l_f;
        Ok(y)
    }
}

/// Assembles `𝒢` column by column (small problems only).
pub fn dense_reduced_hessian<T: Scalar>(problem: &ReducedProblem<'_, T>) -> Result<Vec<Vec<T>>> {
    let n = problem.blocks.n_w();
    (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            problem.apply_hessian(&e)
        })
        .collect()
}
