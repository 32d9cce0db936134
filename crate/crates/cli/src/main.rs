//! Command-line front end: configured solves, benchmark refinement studies, random
//! network experiments and the built-in oracle suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dfm::assembly::{Discretization, SystemBlocks};
use dfm::config::RunConfig;
use dfm::harness::{
    convergence_study, dfn_stats, generate_random_dfn, run_checks, run_dfn_experiment, Benchmark, DfnLevelReport,
    DfnOptions, StudyOptions,
};
use dfm::postprocess::{
    error_norms, fit_rates, write_convergence_csv, write_full_norm_csv, write_vtk_fracture, write_vtk_tet,
};
use dfm::solver::{solve, CgOptions, CgStatus, CgVariant, SolveReport};
use dfm::{Error, Real};

#[derive(Parser)]
#[command(
    name = "dfm",
    version,
    about = "Discrete fracture-matrix flow by constrained optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a configuration file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "output")]
        out: PathBuf,
        /// Print the CG residual at every iteration.
        #[arg(long)]
        verbose: bool,
    },
    /// Refinement study on a benchmark with a known solution.
    Converge {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        problem: u32,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Tet size at the coarsest level.
        #[arg(long, default_value_t = 0.25)]
        delta0: Real,
        #[arg(long, default_value = "output")]
        out: PathBuf,
    },
    /// Random fracture network in the cube [-1, 1]^3.
    Dfn {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        fractures: usize,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long, default_value_t = 0.25)]
        delta0: Real,
        /// CG variants to run (coupled, beta_lagged).
        #[arg(long = "variant", default_value = "coupled", value_delimiter = ',')]
        variants: Vec<String>,
        #[arg(long, default_value_t = 5000)]
        max_iter: usize,
        #[arg(long, default_value = "output")]
        out: PathBuf,
    },
    /// Run the built-in oracle suite.
    Check,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Input(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Solver(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Solver(format!("i/o error: {e}"))
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Solve { config, out, verbose } => cmd_solve(&config, &out, verbose),
        Command::Converge {
            problem,
            levels,
            delta0,
            out,
        } => cmd_converge(problem, levels, delta0, &out),
        Command::Dfn {
            seed,
            fractures,
            levels,
            delta0,
            variants,
            max_iter,
            out,
        } => cmd_dfn(seed, fractures, levels, delta0, &variants, max_iter, &out),
        Command::Check => cmd_check(),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver failure: {msg}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> CliResult {
    let Ok(value) = std::env::var("DFM_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("DFM_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Solver(format!("cannot start thread pool: {e}")))
}

fn create_out(dir: &Path) -> CliResult {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Input(format!("cannot create output directory {}: {e}", dir.display())))
}

fn secs(d: std::time::Duration) -> f64 {
    d.as_secs_f64()
}

fn describe_report(r: &SolveReport<Real>) -> String {
    let t = &r.timings;
    format!(
        "variant {}\nstatus {:?}\niterations {}\nrelative residual {:e}\ntrue residual {:e}\nfunctional {:e}\n\
         constraint residual {:e}\nmin curvature {:e}\ndrift corrections {}\nunknowns {}\n\
         time mesh {:.3}s intersections {:.3}s assembly {:.3}s factorization {:.3}s cg {:.3}s total {:.3}s\n",
        r.variant.name(),
        r.status,
        r.iterations,
        r.relative_residual,
        r.true_residual,
        r.functional,
        r.constraint_residual,
        r.min_curvature,
        r.drift_corrections,
        r.n_unknowns,
        secs(t.mesh),
        secs(t.intersections),
        secs(t.assembly),
        secs(t.factorization),
        secs(t.cg),
        secs(t.total),
    )
}

fn write_fields(out: &Path, disc: &Discretization<Real>, h_d: &[Real], h_f: &[Vec<Real>]) -> CliResult {
    write_vtk_tet(&out.join("matrix.vtk"), &disc.tet_mesh, h_d)?;
    for (i, ((mesh, f), h)) in disc.h_meshes.iter().zip(&disc.network.fractures).zip(h_f).enumerate() {
        write_vtk_fracture(&out.join(format!("fracture_{i}.vtk")), mesh, f, h)?;
    }
    Ok(())
}

fn write_matrices(out: &Path, blocks: &SystemBlocks<Real>) -> CliResult {
    let a_f = blocks.a_f_matrix();
    let named = [
        ("A_D", &blocks.a_d),
        ("A_F", &a_f),
        ("G", &blocks.g),
        ("G_DF", &blocks.g_df),
        ("B", &blocks.b),
        ("C", &blocks.c),
        ("D", &blocks.d),
        ("E", &blocks.e),
    ];
    for (name, m) in named {
        let file = File::create(out.join(format!("{name}.mtx")))?;
        m.write_matrix_market(BufWriter::new(file))?;
    }
    Ok(())
}

fn cmd_solve(config: &Path, out: &Path, verbose: bool) -> CliResult {
    let cfg = RunConfig::from_file(config)?;
    let network = cfg.network::<Real>()?;
    let stats = dfn_stats(&network);
    let disc = Discretization::build(network, cfg.mesh_sizes())?;
    let n = &cfg.numerics;
    let (blocks, sol) = solve(&disc, n.alpha, n.beta, &cfg.cg_options(verbose))?;
    create_out(out)?;

    let mut report = String::new();
    let _ = writeln!(report, "config {}", config.display());
    let _ = writeln!(report, "network {stats}");
    let _ = writeln!(
        report,
        "tets {} n_h {} n_q {} n_u {}",
        disc.tet_mesh.n_tets(),
        disc.layout.n_h(),
        disc.layout.n_q(),
        disc.layout.n_u()
    );
    report.push_str(&describe_report(&sol.report));
    if let Some(bench) = cfg.output.exact {
        let e = error_norms(&disc, &sol.h_d, &sol.h_f, &bench.exact(), true);
        let _ = writeln!(
            report,
            "errors vs {}: L2_D {:e} H1_D {:e} L2_F {:e} H1_F {:e}",
            bench.name(),
            e.l2_d,
            e.h1_d,
            e.l2_f,
            e.h1_f
        );
    }
    print!("{report}");
    fs::write(out.join("report.txt"), &report)?;
    if cfg.output.vtk {
        write_fields(out, &disc, &sol.h_d, &sol.h_f)?;
    }
    if cfg.output.matrices {
        write_matrices(out, &blocks)?;
    }
    if sol.report.status != CgStatus::Converged {
        return Err(Failure::Solver(format!(
            "CG stopped after {} iterations at relative residual {:e}",
            sol.report.iterations, sol.report.relative_residual
        )));
    }
    Ok(())
}

fn cmd_converge(problem: u32, levels: usize, delta0: Real, out: &Path) -> CliResult {
    if levels == 0 || !(delta0 > 0.0) {
        return Err(Failure::Input("levels and delta0 must be positive".into()));
    }
    let bench = Benchmark::from_number(problem).ok_or_else(|| Failure::Input(format!("unknown problem {problem}")))?;
    create_out(out)?;
    let opts = StudyOptions::<Real> {
        levels,
        delta_d0: delta0,
        ..Default::default()
    };
    println!("{} with {levels} levels", bench.name());
    let results = convergence_study(bench, &opts, |level, disc, _, sol| {
        println!(
            "level {level}: {} tets, {} unknowns, {} iterations, functional {:e}",
            disc.tet_mesh.n_tets(),
            sol.report.n_unknowns,
            sol.report.iterations,
            sol.report.functional
        );
        Ok(())
    })?;
    let rows: Vec<_> = results.iter().map(|r| r.row.clone()).collect();
    write_convergence_csv(&out.join("convergence.csv"), &rows)?;
    write_full_norm_csv(&out.join("convergence_full_norms.csv"), &rows)?;
    println!("level  delta_D   errL2_D      errH1_D      errL2_F      errH1_F");
    for r in &rows {
        println!(
            "{:>5}  {:<8}  {:.4e}  {:.4e}  {:.4e}  {:.4e}",
            r.level, r.delta_d, r.err_l2_d, r.err_h1_d, r.err_l2_f, r.err_h1_f
        );
    }
    if rows.len() >= 2 {
        let rates = fit_rates(&rows)?;
        println!("L2 slope: D {:.3}, F {:.3}", rates.l2_d, rates.l2_f);
        println!("H1 slope: D {:.3}, F {:.3}", rates.h1_d, rates.h1_f);
    }
    if let Some(r) = results.iter().find(|r| r.report.status != CgStatus::Converged) {
        return Err(Failure::Solver(format!(
            "CG did not converge at delta_D {} ({} iterations)",
            r.row.delta_d, r.report.iterations
        )));
    }
    Ok(())
}

fn dfn_csv(levels: &[DfnLevelReport<Real>]) -> String {
    let mut s =
        String::from("level,delta_D,n_h,n_q,n_u,unknowns,variant,status,iters,rel_residual,functional,cg_seconds\n");
    for (level, l) in levels.iter().enumerate() {
        for run in &l.runs {
            let head = format!(
                "{level},{:e},{},{},{},{},{}",
                l.delta_d,
                l.n_h,
                l.n_q,
                l.n_u,
                l.n_unknowns(),
                run.variant.name()
            );
            match &run.outcome {
                Ok(r) => {
                    let status = match r.status {
                        CgStatus::Converged => "converged",
                        CgStatus::MaxIterReached => "max_iter",
                    };
                    let _ = writeln!(
                        s,
                        "{head},{status},{},{:e},{:e},{:.3}",
                        r.iterations,
                        r.relative_residual,
                        r.functional,
                        secs(r.timings.cg)
                    );
                }
                Err(_) => {
                    let _ = writeln!(s, "{head},failed,,,,");
                }
            }
        }
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn cmd_dfn(
    seed: u64,
    fractures: usize,
    levels: usize,
    delta0: Real,
    variants: &[String],
    max_iter: usize,
    out: &Path,
) -> CliResult {
    if levels == 0 || !(delta0 > 0.0) {
        return Err(Failure::Input("levels and delta0 must be positive".into()));
    }
    let variants = variants
        .iter()
        .map(|v| v.parse::<CgVariant>())
        .collect::<Result<Vec<_>, _>>()?;
    let opts = DfnOptions {
        n_fractures: fractures,
        ..Default::default()
    };
    let network = generate_random_dfn::<Real>(seed, &opts)?;
    create_out(out)?;
    let stats = dfn_stats(&network);
    println!("seed {seed}: {stats}");

    let deltas: Vec<Real> = (0..levels).map(|l| delta0 * 0.5f64.powi(l as i32)).collect();
    let cg = CgOptions {
        max_iter,
        ..CgOptions::default()
    };
    let reports = run_dfn_experiment(&network, &deltas, 1.0, 1.0, &variants, &cg)?;

    let mut failures = Vec::new();
    for (level, l) in reports.iter().enumerate() {
        println!(
            "level {level}: delta_D {}, {} tets, unknowns {} (n_h {} + n_q {} + n_u {})",
            l.delta_d,
            l.n_tets,
            l.n_unknowns(),
            l.n_h,
            l.n_q,
            l.n_u
        );
        for run in &l.runs {
            match &run.outcome {
                Ok(r) => {
                    println!(
                        "  {}: {:?} after {} iterations, residual {:.2e}, functional {:.6e}, cg {:.2}s",
                        run.variant.name(),
                        r.status,
                        r.iterations,
                        r.relative_residual,
                        r.functional,
                        secs(r.timings.cg)
                    );
                    if r.status != CgStatus::Converged {
                        failures.push(format!("{} did not converge at level {level}", run.variant.name()));
                    }
                }
                Err(e) => {
                    println!("  {}: failed: {e}", run.variant.name());
                    failures.push(format!("{} at level {level}: {e}", run.variant.name()));
                }
            }
        }
    }
    fs::write(out.join("dfn.csv"), dfn_csv(&reports))?;
    fs::write(out.join("network.txt"), format!("seed {seed}\n{stats}\n"))?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Solver(failures.join("; ")))
    }
}

fn cmd_check() -> CliResult {
    let results = run_checks()?;
    let passed = results.iter().filter(|r| r.passed).count();
    for r in &results {
        println!("[{}] {}: {}", if r.passed { "pass" } else { "FAIL" }, r.name, r.detail);
    }
    println!("{passed}/{} checks passed", results.len());
    if passed == results.len() {
        Ok(())
    } else {
        Err(Failure::Solver(format!("{} checks failed", results.len() - passed)))
    }
}
