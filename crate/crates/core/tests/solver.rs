mod common;

use common::*;
use dfm::assembly::{assemble_system, Discretization, MeshSizes, SystemBlocks};
use dfm::geometry::{BoundaryCondition, FractureNetwork, PorousDomain};
use dfm::harness::{benchmark_level, gradient_error, Benchmark, StudyOptions};
use dfm::solver::{
    constraint_matrix, control_mass, control_matrix, cross_matrix, dense_reduced_hessian, reduced_cg, solve,
    solve_blocks, solve_kkt_direct, CgOptions, CgStatus, CgVariant, InnerSolvers, ReducedProblem, DEFAULT_INNER_TOL,
};
use dfm::sparse::DenseMatrix;
use dfm::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_sizes() -> MeshSizes<f64> {
    MeshSizes {
        delta_d: 0.5,
        delta_f: 0.5,
        delta_gamma: 1.0,
        delta_s: 0.5,
    }
}

fn instances() -> Vec<(Discretization<f64>, f64, f64)> {
    let opts = StudyOptions::<f64>::default();
    vec![
        (benchmark_level(Benchmark::Smooth, 0.25, &opts).unwrap(), 1.0, 1.0),
        (benchmark_level(Benchmark::Kinked, 0.25, &opts).unwrap(), 1.0, 1.0),
        (crossing_pair(2, small_sizes()), 1.0, 1.0),
        (crossing_pair(2, small_sizes()), 2.0, 0.5),
        (crossing_pair(4, MeshSizes::with_defaults(0.25)), 1.0, 2.0),
    ]
}

fn setup(disc: &Discretization<f64>, alpha: f64, beta: f64) -> (SystemBlocks<f64>, InnerSolvers<f64>) {
    let blocks = assemble_system(disc, alpha, beta).unwrap();
    let inner = InnerSolvers::new(disc, &blocks, DEFAULT_INNER_TOL).unwrap();
    (blocks, inner)
}

fn random(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn hessian_of_zero_is_zero() {
    let (disc, a, b) = instances().remove(2);
    let (blocks, inner) = setup(&disc, a, b);
    let p = ReducedProblem::new(&blocks, &inner);
    assert!(p
        .apply_hessian(&vec![0.0; blocks.n_w()])
        .unwrap()
        .iter()
        .all(|&y| y == 0.0));
}

#[test]
fn reduced_hessian_is_positive_on_random_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (disc, a, b) in instances() {
        let (blocks, inner) = setup(&disc, a, b);
        let p = ReducedProblem::new(&blocks, &inner);
        for _ in 0..100 {
            let d = random(blocks.n_w(), &mut rng);
            assert!(dot(&d, &p.apply_hessian(&d).unwrap()) > 0.0);
        }
    }
}

/// `𝒢 = Xᵀ G X + 𝒞 + Xᵀ ℬ⁺ + ℬ⁺ᵀ X` with `X = 𝒜⁻¹ℬ` from dense LU.
fn brute_force_hessian(blocks: &SystemBlocks<f64>) -> Vec<Vec<f64>> {
    let a = constraint_matrix(blocks);
    let bm = control_matrix(blocks).to_dense();
    let bp = cross_matrix(blocks).to_dense();
    let c = control_mass(blocks).to_dense();
    let g = blocks.g.to_dense();
    let (nh, nw) = (blocks.layout.n_h(), blocks.n_w());
    let mut dense = DenseMatrix::zeros(nh);
    for (r, col, v) in a.triplets() {
        dense.add(r, col, v);
    }
    let lu = dense.lu().unwrap();
    let x: Vec<Vec<f64>> = (0..nw)
        .map(|j| lu.solve(&(0..nh).map(|i| bm[i][j]).collect::<Vec<_>>()))
        .collect();
    let gx: Vec<Vec<f64>> = x.iter().map(|xj| (0..nh).map(|i| dot(&g[i], xj)).collect()).collect();
    let col = |m: &Vec<Vec<f64>>, j: usize| (0..nh).map(|i| m[i][j]).collect::<Vec<_>>();
    (0..nw)
        .map(|i| {
            (0..nw)
                .map(|j| dot(&x[i], &gx[j]) + c[i][j] + dot(&x[i], &col(&bp, j)) + dot(&col(&bp, i), &x[j]))
                .collect()
        })
        .collect()
}

#[test]
fn matrix_free_hessian_matches_brute_force() {
    for (disc, a, b) in instances().into_iter().take(4) {
        let (blocks, inner) = setup(&disc, a, b);
        assert!(
            blocks.layout.total_unknowns() < 200,
            "{}",
            blocks.layout.total_unknowns()
        );
        let p = ReducedProblem::new(&blocks, &inner);
        let reference = brute_force_hessian(&blocks);
        let columns = dense_reduced_hessian(&p).unwrap();
        let scale = reference.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for (r, row) in reference.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert!(
                    (columns[r][c] - v).abs() <= 1e-9 * scale,
                    "({r},{c}): {} vs {v}",
                    columns[r][c]
                );
            }
        }
    }
}

#[test]
fn homogeneous_problem_stops_at_iteration_zero() {
    let fr = vec![plane_z(0, 0.5, BoundaryCondition::dirichlet(0.0))];
    let disc = discretize(
        FractureNetwork::new(zero_dirichlet_cube(), fr).unwrap(),
        4,
        MeshSizes::with_defaults(0.25),
    );
    let (_, sol) = solve(&disc, 1.0, 1.0, &CgOptions::default()).unwrap();
    assert_eq!(sol.report.iterations, 0);
    assert!(sol.w.iter().all(|&x| x == 0.0));
    assert!(sol.h.iter().all(|&x| x == 0.0));
    assert_eq!(sol.report.functional, 0.0);
}

#[test]
fn cg_terminates_within_control_count() {
    for (disc, a, b) in instances().into_iter().take(4) {
        let (blocks, inner) = setup(&disc, a, b);
        let n_w = blocks.n_w();
        assert!(n_w < 100);
        let p = ReducedProblem::new(&blocks, &inner);
        let (g, c) = p.linear_terms().unwrap();
        let opts = CgOptions {
            tol: 1e-12,
            max_iter: n_w,
            ..CgOptions::default()
        };
        let state = reduced_cg(&p, &g, c, &opts).unwrap();
        assert_eq!(
            state.status,
            CgStatus::Converged,
            "n_w {n_w}, residuals {:?}",
            state.residuals
        );
        assert!(state.iteration <= n_w);
    }
}

#[test]
fn cg_agrees_with_direct_saddle_point_solve() {
    for (disc, a, b) in instances() {
        let (blocks, inner) = setup(&disc, a, b);
        let opts = CgOptions {
            tol: 1e-12,
            ..CgOptions::default()
        };
        let sol = solve_blocks(&blocks, &inner, &opts).unwrap();
        let kkt = solve_kkt_direct(&blocks, 5000).unwrap();
        assert!(kkt.relative_residual < 1e-10);
        assert!(rel_diff(&sol.w, &kkt.w) < 1e-8, "{}", rel_diff(&sol.w, &kkt.w));
        assert!(rel_diff(&sol.h, &kkt.h) < 1e-8);
        assert!(sol.report.constraint_residual <= 1e-10);
    }
}

#[test]
fn multiplier_matches_direct_solve_on_one_fracture() {
    let (disc, a, b) = instances().remove(0);
    let (blocks, inner) = setup(&disc, a, b);
    let opts = CgOptions {
        tol: 1e-12,
        ..CgOptions::default()
    };
    let sol = solve_blocks(&blocks, &inner, &opts).unwrap();
    let kkt = solve_kkt_direct(&blocks, 5000).unwrap();
    assert!(rel_diff(&sol.lambda, &kkt.lambda) < 1e-7);
}

#[test]
fn direct_solve_respects_size_cap() {
    let (disc, a, b) = instances().remove(4);
    let (blocks, _) = setup(&disc, a, b);
    assert!(matches!(solve_kkt_direct(&blocks, 10), Err(Error::TooLarge { .. })));
}

#[test]
fn functional_decreases_along_iterates() {
    for (disc, a, b) in instances() {
        let (_, sol) = solve(&disc, a, b, &CgOptions::default()).unwrap();
        let hist = &sol.report.functional_history;
        assert!(hist.windows(2).all(|w| w[1] <= w[0]), "{hist:?}");
        assert!(sol.report.functional >= 0.0);
    }
}

#[test]
fn gradient_matches_central_differences() {
    for (disc, a, b) in instances().into_iter().take(4) {
        let (blocks, inner) = setup(&disc, a, b);
        assert!(blocks.n_w() <= 50);
        let err = gradient_error(&ReducedProblem::new(&blocks, &inner), 9).unwrap();
        assert!(err < 1e-5, "{err:e}");
    }
}

#[test]
fn lagged_variant_approaches_coupled_minimizer() {
    let disc = benchmark_level(Benchmark::Smooth, 0.125, &StudyOptions::default()).unwrap();
    let (blocks, inner) = setup(&disc, 1.0, 1.0);
    let coupled = solve_blocks(&blocks, &inner, &CgOptions::default()).unwrap();
    let opts = CgOptions {
        variant: CgVariant::BetaLagged,
        ..CgOptions::default()
    };
    let lagged = solve_blocks(&blocks, &inner, &opts).unwrap();
    assert_eq!(lagged.report.status, CgStatus::Converged);
    // The lagged operator is not 𝒢, so its fixed point is near, not at, the minimizer.
    assert!(rel_diff(&lagged.w, &coupled.w) < 2e-2);
    assert!(lagged.report.functional >= coupled.report.functional);
    assert!(lagged.report.functional < 1.01 * coupled.report.functional);
}

#[test]
fn invalid_parameters_are_rejected() {
    let (disc, a, b) = instances().remove(2);
    let (blocks, inner) = setup(&disc, a, b);
    let opts = CgOptions {
        tol: 0.0,
        ..CgOptions::default()
    };
    assert!(matches!(
        solve_blocks(&blocks, &inner, &opts),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        assemble_system(&disc, -1.0, 1.0),
        Err(Error::InvalidParameter(_))
    ));

    let domain = PorousDomain::insulated_box(v(0.0, 0.0, 0.0), v(1.0, 1.0, 1.0)).unwrap();
    let fr = vec![plane_z(0, 0.5, BoundaryCondition::dirichlet(1.0))];
    let disc = discretize(FractureNetwork::new(domain, fr).unwrap(), 2, small_sizes());
    assert!(matches!(
        assemble_system(&disc, 1.0, 0.0),
        Err(Error::SingularOperator(_))
    ));

    let fr = vec![plane_z(0, 0.5, BoundaryCondition::insulated())];
    let disc = discretize(
        FractureNetwork::new(zero_dirichlet_cube(), fr).unwrap(),
        2,
        small_sizes(),
    );
    assert!(matches!(
        assemble_system(&disc, 1.0, 1.0),
        Err(Error::SingularOperator(_))
    ));
}

#[test]
fn variant_names_round_trip() {
    for v in [CgVariant::Coupled, CgVariant::BetaLagged] {
        assert_eq!(v.name().parse::<CgVariant>().unwrap(), v);
    }
    assert!("lagged".parse::<CgVariant>().is_err());
}
