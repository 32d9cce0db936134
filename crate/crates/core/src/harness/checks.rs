//! Built-in oracle suite: geometry identities and solver cross-checks on small
//! instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::convergence::{benchmark_level, StudyOptions};
use super::dfn::{dfn_mesh_sizes, generate_random_dfn, DfnOptions};
use super::problems::Benchmark;
use crate::assembly::{assemble_system, Discretization, SystemBlocks};
use crate::error::Result;
use crate::intersection::{build_interface_mesh, Traversal};
use crate::solver::{
    reduced_cg, solve_kkt_direct, CgOptions, InnerSolvers, ReducedProblem, DEFAULT_INNER_TOL, DEFAULT_KKT_CAP,
};

/// Outcome of one oracle check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A small discretized instance with its coupling parameters.
pub struct OracleInstance {
    pub name: String,
    pub disc: Discretization<f64>,
    pub alpha: f64,
    pub beta: f64,
}

/// Small instances with one to three fractures whose KKT systems fit the direct solver.
pub fn oracle_instances() -> Result<Vec<OracleInstance>> {
    let mut out = Vec::new();
    for (bench, delta) in [
        (Benchmark::Smooth, 0.5),
        (Benchmark::Kinked, 0.5),
        (Benchmark::Smooth, 0.25),
    ] {
        let opts = StudyOptions::<f64>::default();
        out.push(OracleInstance {
            name: format!("{} at delta_D {delta}", bench.name()),
            disc: benchmark_level(bench, delta, &opts)?,
            alpha: 1.0,
            beta: 1.0,
        });
    }
    for (seed, n, alpha, beta) in [(11u64, 2usize, 1.0, 1.0), (5, 3, 2.0, 0.5)] {
        let opts = DfnOptions {
            n_fractures: n,
            ..Default::default()
        };
        let network = generate_random_dfn::<f64>(seed, &opts)?;
        out.push(OracleInstance {
            name: format!("{n}-fracture network, seed {seed}"),
            disc: Discretization::build(network, dfn_mesh_sizes(0.5))?,
            alpha,
            beta,
        });
    }
    Ok(out)
}

fn relative(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Interface meshes cover each fracture exactly, and the neighbor walk finds the same
/// cut cells as a scan of every tetrahedron.
pub fn check_interfaces(inst: &OracleInstance) -> CheckResult {
    let disc = &inst.disc;
    let eps = disc.network.eps();
    let mut worst_area = 0.0f64;
    let mut mismatched = 0;
    for (f, iface) in disc.network.fractures.iter().zip(&disc.interfaces) {
        worst_area = worst_area.max((iface.area() - f.area()).abs() / f.area());
        match build_interface_mesh(&disc.tet_mesh, f, eps, Traversal::BruteForce) {
            Ok(brute) => {
                let key = |m: &crate::intersection::InterfaceMesh<f64>| -> Vec<(usize, i64)> {
                    m.cells
                        .iter()
                        .map(|(t, p)| (*t, (p.area() * 1e12).round() as i64))
                        .collect()
                };
                if key(&brute) != key(iface) {
                    mismatched += 1;
                }
            }
            Err(_) => mismatched += 1,
        }
    }
    CheckResult::new(
        format!("interface meshes ({})", inst.name),
        worst_area < 1e-10 && mismatched == 0,
        format!("max relative area error {worst_area:.2e}, {mismatched} walk/scan mismatches"),
    )
}

fn reduced(inst: &OracleInstance) -> Result<(SystemBlocks<f64>, InnerSolvers<f64>)> {
    let blocks = assemble_system(&inst.disc, inst.alpha, inst.beta)?;
    let inner = InnerSolvers::new(&inst.disc, &blocks, DEFAULT_INNER_TOL)?;
    Ok((blocks, inner))
}

/// Central differences of the eliminated functional against `2(𝒢w + g)`. Returns the
/// largest componentwise relative error.
pub fn gradient_error(problem: &ReducedProblem<'_, f64>, seed: u64) -> Result<f64> {
    let blocks = problem.blocks;
    let n = blocks.n_w();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let j = |w: &[f64]| -> Result<f64> {
        let h = problem.state(w)?;
        Ok(blocks.functional(&h, w))
    };
    let (g, _) = problem.linear_terms()?;
    let mut grad = problem.apply_hessian(&w)?;
    for (gi, &li) in grad.iter_mut().zip(&g) {
        *gi = 2.0 * (*gi + li);
    }
    let scale = grad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    for k in 0..n {
        let step = 1e-3;
        let mut wp = w.clone();
        let mut wm = w.clone();
        wp[k] += step;
        wm[k] -= step;
        let fd = (j(&wp)? - j(&wm)?) / (2.0 * step);
        let err = (fd - grad[k]).abs() / grad[k].abs().max(1e-3 * scale);
        worst = worst.max(err);
    }
    Ok(worst)
}

pub fn check_gradient(inst: &OracleInstance) -> Result<CheckResult> {
    let (blocks, inner) = reduced(inst)?;
    let problem = ReducedProblem::new(&blocks, &inner);
    let err = gradient_error(&problem, 3)?;
    Ok(CheckResult::new(
        format!("gradient ({}, {} controls)", inst.name, blocks.n_w()),
        err < 1e-5,
        format!("max componentwise relative error {err:.2e}"),
    ))
}

/// Reduced CG against the direct saddle-point solve.
pub fn check_kkt(inst: &OracleInstance) -> Result<CheckResult> {
    let (blocks, inner) = reduced(inst)?;
    let problem = ReducedProblem::new(&blocks, &inner);
    let (g, c) = problem.linear_terms()?;
    let opts = CgOptions {
        tol: 1e-12,
        ..CgOptions::default()
    };
    let cg = reduced_cg(&problem, &g, c, &opts)?;
    let kkt = solve_kkt_direct(&blocks, DEFAULT_KKT_CAP)?;
    let err = relative(&cg.w, &kkt.w);
    let h = problem.state(&cg.w)?;
    let (res, nb) = problem.constraint_residual(&h, &cg.w);
    let cres = if nb > 0.0 { res / nb } else { res };
    Ok(CheckResult::new(
        format!("CG vs KKT ({})", inst.name),
        err < 1e-7 && cres < 1e-10 && kkt.relative_residual < 1e-10,
        format!(
            "w relative difference {err:.2e}, CG constraint residual {cres:.2e}, KKT residual {:.2e}",
            kkt.relative_residual
        ),
    ))
}

/// `dᵀ𝒢d > 0` along random directions.
pub fn check_positive_curvature(inst: &OracleInstance, draws: usize) -> Result<CheckResult> {
    let (blocks, inner) = reduced(inst)?;
    let problem = ReducedProblem::new(&blocks, &inner);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..draws {
        let d: Vec<f64> = (0..blocks.n_w()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = problem.apply_hessian(&d)?;
        let dy: f64 = d.iter().zip(&y).map(|(a, b)| a * b).sum();
        let dd: f64 = d.iter().map(|a| a * a).sum();
        min_ratio = min_ratio.min(dy / dd);
    }
    Ok(CheckResult::new(
        format!("positive curvature ({})", inst.name),
        min_ratio > 0.0,
        format!("min d'Gd/d'd over {draws} directions {min_ratio:.3e}"),
    ))
}

/// Runs every check on every oracle instance.
pub fn run_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for inst in oracle_instances()? {
        out.push(check_interfaces(&inst));
        out.push(check_positive_curvature(&inst, 20)?);
        out.push(check_kkt(&inst)?);
        if inst.disc.layout.n_w() <= 60 {
            out.push(check_gradient(&inst)?);
        }
    }
    Ok(out)
}
