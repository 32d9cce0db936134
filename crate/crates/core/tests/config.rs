use std::path::{Path, PathBuf};

use dfm::assembly::Discretization;
use dfm::config::{BcSpec, FieldSpec, RunConfig};
use dfm::harness::{benchmark_level, Benchmark, StudyOptions};
use dfm::postprocess::{error_norms, write_convergence_csv, ConvergenceRow};
use dfm::solver::{solve, CgVariant};
use dfm::Error;

const MINIMAL: &str = "\
[domain]
min = 0 0 0
max = 1 1 1
face.zmin = dirichlet 0
face.zmax = dirichlet poly 1 0 0 2

[fracture.1]
vertices = 0 0 0.5; 1 0 0.5; 1 1 0.5; 0 1 0.5
edges = dirichlet 1

[numerics]
delta_d = 0.5
";

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn parse_err(text: &str) -> (usize, String, String) {
    match RunConfig::parse(text, "t.cfg") {
        Err(Error::ConfigParse {
            line, field, message, ..
        }) => (line, field, message),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn minimal_config_fills_defaults() {
    let cfg = RunConfig::parse(MINIMAL, "t.cfg").unwrap();
    let d = cfg.domain.as_ref().unwrap();
    assert_eq!(d.max, [1.0, 1.0, 1.0]);
    assert_eq!(d.permeability, vec![1.0]);
    assert_eq!(d.faces[0], BcSpec::Neumann(FieldSpec::Constant(0.0)));
    assert_eq!(d.faces[5], BcSpec::Dirichlet(FieldSpec::Poly(vec![1.0, 0.0, 0.0, 2.0])));
    assert_eq!(cfg.fractures.len(), 1);
    assert_eq!(cfg.numerics.delta_d, 0.5);
    assert_eq!(cfg.numerics.alpha, 1.0);
    assert_eq!(cfg.numerics.variant, CgVariant::Coupled);
    assert!(!cfg.output.vtk);
    let net = cfg.network::<f64>().unwrap();
    assert_eq!(net.fractures.len(), 1);
    assert!(net.fractures[0].has_dirichlet());
}

#[test]
fn serialization_round_trips() {
    for name in ["problem1.cfg", "problem2.cfg", "dfn.cfg"] {
        let cfg = RunConfig::from_file(&config_dir().join(name)).unwrap();
        let again = RunConfig::parse(&cfg.serialize(), "again").unwrap();
        assert_eq!(cfg, again, "{name}");
    }
    let cfg = RunConfig::parse(MINIMAL, "t.cfg").unwrap();
    assert_eq!(RunConfig::parse(&cfg.serialize(), "again").unwrap(), cfg);
}

#[test]
fn shipped_configs_build_networks() {
    let p1 = RunConfig::from_file(&config_dir().join("problem1.cfg")).unwrap();
    assert_eq!(p1.output.exact, Some(Benchmark::Kinked));
    assert_eq!(p1.network::<f64>().unwrap().fractures.len(), 1);
    let dfn = RunConfig::from_file(&config_dir().join("dfn.cfg")).unwrap();
    let g = dfn.generator.as_ref().unwrap();
    assert_eq!((g.seed, g.fractures), (7, 20));
    assert_eq!(dfn.network::<f64>().unwrap().fractures.len(), 20);
    assert!(dfn.generated_domain::<f64>().is_some());
}

#[test]
fn errors_point_at_line_and_field() {
    let (line, field, msg) = parse_err("[domain]\nmin = 0 0\n");
    assert_eq!((line, field.as_str()), (2, "min"));
    assert!(!msg.is_empty());

    let (line, field, _) = parse_err(&MINIMAL.replace("delta_d = 0.5", "delta_d = fast"));
    assert_eq!((line, field.as_str()), (12, "delta_d"));

    let (line, field, _) = parse_err(&MINIMAL.replace("edges = dirichlet 1", "edges = robin 1"));
    assert_eq!((line, field.as_str()), (9, "edges"));

    let (line, _, msg) = parse_err("[nonsense]\n");
    assert_eq!(line, 1);
    assert!(msg.contains("unknown section"));

    let (line, field, _) = parse_err("[domain]\nmax = 1 1 1\n");
    assert_eq!((line, field.as_str()), (1, "min"));

    let (line, _, _) = parse_err("alpha = 1\n[domain]\nmin = 0 0 0\nmax = 1 1 1\n");
    assert_eq!(line, 1);

    let (_, field, _) = parse_err(&MINIMAL.replace("[numerics]", "[numerics]\nwobble = 3"));
    assert_eq!(field, "wobble");

    let err = RunConfig::parse("[domain]\nmin = 0 0\n", "t.cfg").unwrap_err();
    assert_eq!(
        err.to_string(),
        format!("t.cfg:2: field `min`: {}", parse_err("[domain]\nmin = 0 0\n").2)
    );
    assert!(err.is_input_error());
}

#[test]
fn generator_excludes_explicit_geometry() {
    let text = format!("{MINIMAL}\n[generator]\nseed = 1\n");
    let (line, _, msg) = parse_err(&text);
    assert_eq!(line, 0);
    assert!(msg.contains("[generator]"));
    let (_, _, msg) = parse_err("[numerics]\nalpha = 1\n");
    assert!(msg.contains("required"));
    let (_, field, _) = parse_err("[generator]\nfractures = 3\n");
    assert_eq!(field, "seed");
}

#[test]
fn stabilization_parameters_are_validated() {
    let (_, field, _) = parse_err(&MINIMAL.replace("[numerics]", "[numerics]\nalpha = -1"));
    assert_eq!(field, "alpha");
    let (_, field, _) = parse_err(&MINIMAL.replace("[numerics]", "[numerics]\nbeta = -0.5"));
    assert_eq!(field, "beta");
    let (_, field, _) = parse_err(&MINIMAL.replace("[numerics]", "[numerics]\ntol = 0"));
    assert_eq!(field, "tol");
    // A fracture without Dirichlet edges needs the trace term.
    let insulated = MINIMAL.replace("edges = dirichlet 1", "edges = neumann 0");
    let (_, field, msg) = parse_err(&insulated.replace("[numerics]", "[numerics]\nalpha = 0"));
    assert_eq!(field, "alpha");
    assert!(msg.contains("Dirichlet"));
    assert!(RunConfig::parse(&MINIMAL.replace("[numerics]", "[numerics]\nalpha = 0"), "t.cfg").is_ok());
    // An insulated box needs the interface term.
    let no_faces = MINIMAL
        .replace("face.zmin = dirichlet 0\n", "")
        .replace("face.zmax = dirichlet poly 1 0 0 2\n", "");
    let (_, field, _) = parse_err(&no_faces.replace("[numerics]", "[numerics]\nbeta = 0"));
    assert_eq!(field, "beta");
    let (_, field, _) = parse_err("[generator]\nseed = 1\n[numerics]\nalpha = 0\n");
    assert_eq!(field, "alpha");
}

#[test]
fn missing_file_is_an_input_error() {
    let err = RunConfig::from_file(Path::new("/nonexistent/run.cfg")).unwrap_err();
    assert!(err.is_input_error());
    assert!(err.to_string().starts_with("/nonexistent/run.cfg: cannot read file"));
}

fn solve_to_csv(cfg: &RunConfig, path: &Path) -> Vec<f64> {
    let disc = Discretization::build(cfg.network::<f64>().unwrap(), cfg.mesh_sizes()).unwrap();
    let n = &cfg.numerics;
    let (_, sol) = solve(&disc, n.alpha, n.beta, &cfg.cg_options(false)).unwrap();
    let e = error_norms(&disc, &sol.h_d, &sol.h_f, &cfg.output.exact.unwrap().exact(), true);
    let row = ConvergenceRow {
        level: 0,
        delta_d: n.delta_d,
        delta_f: n.delta_d * n.f_ratio,
        err_l2_d: e.l2_d,
        err_h1_d: e.h1_d,
        err_l2_f: e.l2_f,
        err_h1_f: e.h1_f,
        iterations: sol.report.iterations,
        functional: sol.report.functional,
    };
    write_convergence_csv(path, &[row]).unwrap();
    sol.w
}

#[test]
fn identical_configs_give_identical_output() {
    let mut cfg = RunConfig::from_file(&config_dir().join("problem2.cfg")).unwrap();
    cfg.numerics.delta_d = 0.25;
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let wa = solve_to_csv(&cfg, &a);
    let wb = solve_to_csv(&cfg, &b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        wa.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        wb.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );

    // The config file describes the same problem as the built-in benchmark.
    let disc = benchmark_level(Benchmark::Smooth, 0.25, &StudyOptions::default()).unwrap();
    let (_, bench) = solve(&disc, 1.0, 1.0, &cfg.cg_options(false)).unwrap();
    let from_cfg =
        Discretization::build_with_tet_mesh(cfg.network::<f64>().unwrap(), disc.tet_mesh.clone(), cfg.mesh_sizes())
            .unwrap();
    let (_, sol) = solve(&from_cfg, 1.0, 1.0, &cfg.cg_options(false)).unwrap();
    let diff = bench
        .w
        .iter()
        .zip(&sol.w)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(diff < 1e-12, "{diff}");
}
