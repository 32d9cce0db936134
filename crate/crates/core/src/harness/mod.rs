//! Reproducible experiments: benchmark problems, refinement studies and random networks.

mod checks;
mod convergence;
mod dfn;
mod problems;

pub use checks::{
    check_gradient, check_interfaces, check_kkt, check_positive_curvature, gradient_error, oracle_instances,
    run_checks, CheckResult, OracleInstance,
};
pub use convergence::{benchmark_level, convergence_study, LevelResult, StudyOptions};
pub use dfn::{
    dfn_domain, dfn_mesh_sizes, dfn_stats, generate_random_dfn, run_dfn_experiment, DfnLevelReport, DfnOptions,
    DfnStats, VariantRun,
};
pub use problems::{problem1_setup, problem2_setup, Benchmark, ProblemSetup};
