//! Reduced conjugate gradient solver for the constrained minimization.

mod cg;
mod functional;
mod inner;
mod kkt;
mod reduced;

use std::time::{Duration, Instant};

pub use cg::{reduced_cg, CgOptions, CgState, CgStatus, CgVariant};
pub use functional::{evaluate_functional, functional_by_quadrature};
pub use inner::{InnerSolvers, DEFAULT_INNER_TOL};
pub use kkt::{
    constraint_matrix, control_mass, control_matrix, cross_matrix, solve_kkt_direct, KktSolution, DEFAULT_KKT_CAP,
};
pub use reduced::{dense_reduced_hessian, LaggedHessian, ReducedProblem};

use crate::assembly::{assemble_system, Discretization, SystemBlocks};
use crate::error::Result;
use crate::Scalar;

#[derive(Clone, Debug, Default)]
pub struct Timings {
    pub mesh: Duration,
    pub intersections: Duration,
    pub assembly: Duration,
    pub factorization: Duration,
    pub cg: Duration,
    pub total: Duration,
}

#[derive(Clone, Debug)]
pub struct SolveReport<T> {
    pub variant: CgVariant,
    pub iterations: usize,
    pub status: CgStatus,
    /// `‖γ_k‖ / ‖γ_0‖` at exit (recursive gradient).
    pub relative_residual: T,
    /// `‖𝒢w + g‖ / ‖γ_0‖` at exit (recomputed).
    pub true_residual: T,
    /// `𝒥` at the solution, clamped at zero against roundoff.
    pub functional: T,
    pub residual_history: Vec<T>,
    pub functional_history: Vec<T>,
    pub min_curvature: T,
    pub drift_corrections: usize,
    pub max_drift: T,
    /// Relative residual of `𝒜h − ℬw = b`.
    pub constraint_residual: T,
    /// `𝒩_h + 𝒩_q + 𝒩_u`.
    pub n_unknowns: usize,
    pub timings: Timings,
}

/// Solution fields on complete meshes.
#[derive(Clone, Debug)]
pub struct Solution<T> {
    /// Reduced state and control.
    pub h: Vec<T>,
    pub w: Vec<T>,
    pub lambda: Vec<T>,
    /// Head at every tet vertex.
    pub h_d: Vec<T>,
    /// Head at every vertex of each fracture mesh.
    pub h_f: Vec<Vec<T>>,
    pub report: SolveReport<T>,
}

impl<T: Scalar> Solution<T> {
    pub fn u<'a>(&'a self, blocks: &SystemBlocks<T>) -> &'a [T] {
        &self.w[blocks.n_q()..]
    }
}

/// Splits a full `h` (Dirichlet nodes included) into matrix and per-fracture parts.
pub fn split_full_h<T: Scalar>(blocks: &SystemBlocks<T>, h: &[T]) -> (Vec<T>, Vec<Vec<T>>) {
    let full = blocks.full.expand(h);
    let nd = blocks.full.n_hd;
    let offs = &blocks.full.hf_offsets;
    let h_f = offs.windows(2).map(|o| full[nd + o[0]..nd + o[1]].to_vec()).collect();
    (full[..nd].to_vec(), h_f)
}

/// Runs CG on assembled blocks with existing factorizations and recovers `h` and `λ`.
pub fn solve_blocks<T: Scalar>(
    blocks: &SystemBlocks<T>,
    inner: &InnerSolvers<T>,
    opts: &CgOptions<T>,
) -> Result<Solution<T>> {
    let problem = ReducedProblem::new(blocks, inner);
    let (g, constant) = problem.linear_terms()?;
    let state = reduced_cg(&problem, &g, constant, opts)?;
    let h = problem.state(&state.w)?;
    let lambda = problem.multiplier(&h, &state.w)?;
    let (res, nb) = problem.constraint_residual(&h, &state.w);
    let constraint_residual = if nb > T::zero() { res / nb } else { res };
    let functional = blocks.functional(&h, &state.w).max(T::zero());
    let (h_d, h_f) = split_full_h(blocks, &h);
    let report = SolveReport {
        variant: opts.variant,
        iterations: state.iteration,
        status: state.status,
        relative_residual: *state.residuals.last().unwrap_or(&T::zero()),
        true_residual: state.true_residual,
        functional,
        residual_history: state.residuals,
        functional_history: state.functionals,
        min_curvature: state.min_curvature,
        drift_corrections: state.drift_corrections,
        max_drift: state.max_drift,
        constraint_residual,
        n_unknowns: blocks.layout.total_unknowns(),
        timings: Timings {
            assembly: blocks.assembly_time,
            cg: state.elapsed,
            ..Timings::default()
        },
    };
    Ok(Solution {
        h,
        w: state.w,
        lambda,
        h_d,
        h_f,
        report,
    })
}

/// Assembles, factors and solves on a discretization.
pub fn solve<T: Scalar>(
    disc: &Discretization<T>,
    alpha: T,
    beta: T,
    opts: &CgOptions<T>,
) -> Result<(SystemBlocks<T>, Solution<T>)> {
    let start = Instant::now();
    let blocks = assemble_system(disc, alpha, beta)?;
    let t = Instant::now();
    let inner = InnerSolvers::new(disc, &blocks, T::lit(DEFAULT_INNER_TOL))?;
    let factorization = t.elapsed();
    let mut sol = solve_blocks(&blocks, &inner, opts)?;
    let tm = &mut sol.report.timings;
    tm.mesh = disc.mesh_time;
    tm.intersections = disc.intersection_time;
    tm.factorization = factorization;
    tm.total = start.elapsed() + disc.mesh_time + disc.intersection_time;
    Ok((blocks, sol))
}
