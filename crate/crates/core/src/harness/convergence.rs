//! Mesh refinement studies on the benchmark problems.

use super::problems::Benchmark;
use crate::assembly::{Discretization, MeshSizes, SystemBlocks};
use crate::error::Result;
use crate::mesh::{build_box_tet_mesh_with_divisions, divisions};
use crate::postprocess::{error_norms, ConvergenceRow, ErrorNorms};
use crate::solver::{solve, CgOptions, Solution, SolveReport};
use crate::Scalar;

#[derive(Clone, Debug)]
pub struct StudyOptions<T> {
    pub levels: usize,
    /// Tet size at the coarsest level; halved at each level.
    pub delta_d0: T,
    pub f_ratio: T,
    pub gamma_ratio: T,
    pub s_ratio: T,
    pub alpha: T,
    pub beta: T,
    pub cg: CgOptions<T>,
    pub split_cut_cells: bool,
}

impl<T: Scalar> Default for StudyOptions<T> {
    fn default() -> Self {
        Self {
            levels: 4,
            delta_d0: T::lit(0.25),
            f_ratio: T::lit(2.0),
            gamma_ratio: T::lit(2.0),
            s_ratio: T::lit(2.0),
            alpha: T::one(),
            beta: T::one(),
            cg: CgOptions::default(),
            split_cut_cells: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LevelResult<T> {
    pub row: ConvergenceRow<T>,
    pub norms: ErrorNorms<T>,
    /// Errors without splitting cut cells.
    pub norms_unsplit: ErrorNorms<T>,
    pub report: SolveReport<T>,
}

/// Discretizes a benchmark with `n × n × (n + 1)` cells so the fracture plane cuts
/// through tets rather than along faces.
pub fn benchmark_level<T: Scalar>(bench: Benchmark, delta_d: T, opts: &StudyOptions<T>) -> Result<Discretization<T>> {
    let setup = bench.setup(opts.alpha, opts.beta)?;
    let n = divisions(T::one(), delta_d);
    let tet = build_box_tet_mesh_with_divisions(&setup.network.domain, [n, n, n + 1])?;
    let sizes = MeshSizes::from_ratios(delta_d, opts.f_ratio, opts.gamma_ratio, opts.s_ratio);
    Discretization::build_with_tet_mesh(setup.network, tet, sizes)
}

/// Solves every level and reports errors against the exact solution. `on_level` sees
/// each solved level before it is dropped.
pub fn convergence_study<T: Scalar>(
    bench: Benchmark,
    opts: &StudyOptions<T>,
    mut on_level: impl FnMut(usize, &Discretization<T>, &SystemBlocks<T>, &Solution<T>) -> Result<()>,
) -> Result<Vec<LevelResult<T>>> {
    let exact = bench.exact::<T>();
    let mut out = Vec::with_capacity(opts.levels);
    let mut delta = opts.delta_d0;
    for level in 0..opts.levels {
        let disc = benchmark_level(bench, delta, opts)?;
        let (blocks, sol) = solve(&disc, opts.alpha, opts.beta, &opts.cg)?;
        let norms = error_norms(&disc, &sol.h_d, &sol.h_f, &exact, opts.split_cut_cells);
        let norms_unsplit = error_norms(&disc, &sol.h_d, &sol.h_f, &exact, false);
        on_level(level, &disc, &blocks, &sol)?;
        out.push(LevelResult {
            row: ConvergenceRow {
                level,
                delta_d: delta,
                delta_f: delta * opts.f_ratio,
                err_l2_d: norms.l2_d,
                err_h1_d: norms.h1_d,
                err_l2_f: norms.l2_f,
                err_h1_f: norms.h1_f,
                iterations: sol.report.iterations,
                functional: sol.report.functional,
            },
            norms,
            norms_unsplit,
            report: sol.report,
        });
        delta = delta * T::lit(0.5);
    }
    Ok(out)
}
