mod common;

use common::*;
use dfm::assembly::MeshSizes;
use dfm::geometry::{BoundaryCondition, FractureNetwork, Vec3};
use dfm::mesh::build_box_tet_mesh_with_divisions;
use dfm::mesh::io::parse_tet_mesh;
use dfm::postprocess::{
    error_norms, fit_rates, loglog_slope, write_convergence_csv, write_full_norm_csv, write_vtk_fracture,
    write_vtk_tet, AnalyticSolution, ConvergenceRow,
};
use dfm::Error;
use proptest::prelude::*;

fn single() -> dfm::assembly::Discretization<f64> {
    let fr = vec![plane_z(0, 0.5, BoundaryCondition::dirichlet(0.0))];
    discretize(
        FractureNetwork::new(zero_dirichlet_cube(), fr).unwrap(),
        4,
        MeshSizes::with_defaults(0.25),
    )
}

fn nodal(disc: &dfm::assembly::Discretization<f64>, f: impl Fn(Vec3<f64>) -> f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let h_d = disc.tet_mesh.vertices.iter().map(|&p| f(p)).collect();
    let h_f = disc
        .h_meshes
        .iter()
        .zip(&disc.network.fractures)
        .map(|(m, fr)| m.vertices.iter().map(|&p| f(fr.frame.from_local(p))).collect())
        .collect();
    (h_d, h_f)
}

#[test]
fn linear_fields_are_reproduced_exactly() {
    let disc = single();
    let lin = |p: Vec3<f64>| 1.0 + 2.0 * p.x - p.y + 0.5 * p.z;
    let exact = AnalyticSolution::new(lin, |_| Vec3::new(2.0, -1.0, 0.5));
    let (h_d, h_f) = nodal(&disc, lin);
    for split in [true, false] {
        let e = error_norms(&disc, &h_d, &h_f, &exact, split);
        assert!(
            e.l2_d < 1e-12 && e.h1_d < 1e-12 && e.l2_f < 1e-12 && e.h1_f < 1e-12,
            "{e:?}"
        );
    }
}

#[test]
fn zero_field_against_unit_solution_has_unit_error() {
    let disc = single();
    let exact = AnalyticSolution::new(|_| 1.0, |_| Vec3::zero());
    let (h_d, h_f) = nodal(&disc, |_| 0.0);
    let e = error_norms(&disc, &h_d, &h_f, &exact, true);
    assert!((e.l2_d - 1.0).abs() < 1e-12);
    assert!((e.l2_f - 1.0).abs() < 1e-12);
    assert_eq!(e.h1_d, 0.0);
    assert!((e.h1_full_d() - 1.0).abs() < 1e-12);
}

fn rows(errs: impl Fn(f64) -> (f64, f64)) -> Vec<ConvergenceRow<f64>> {
    (0..4)
        .map(|level| {
            let d = 0.25 * 0.5f64.powi(level);
            let (a, b) = errs(d);
            ConvergenceRow {
                level: level as usize,
                delta_d: d,
                delta_f: 2.0 * d,
                err_l2_d: a,
                err_h1_d: b,
                err_l2_f: a * 4.0,
                err_h1_f: b * 2.0,
                iterations: 10,
                functional: d,
            }
        })
        .collect()
}

#[test]
fn synthetic_rates_are_recovered() {
    let r = fit_rates(&rows(|d| (d * d, d))).unwrap();
    assert!((r.l2_d - 2.0).abs() < 1e-12);
    assert!((r.h1_d - 1.0).abs() < 1e-12);
    assert!((r.l2_f - 2.0).abs() < 1e-12);
    assert!((r.h1_f - 1.0).abs() < 1e-12);
}

#[test]
fn degenerate_fits_are_rejected() {
    assert!(matches!(
        fit_rates(&rows(|d| (1e-16 * d, d))),
        Err(Error::DegenerateFit(_))
    ));
    assert!(matches!(loglog_slope(&[1.0], &[1.0]), Err(Error::DegenerateFit(_))));
    assert!(matches!(
        loglog_slope(&[0.5, 0.5], &[1.0, 2.0]),
        Err(Error::DegenerateFit(_))
    ));
}

proptest! {
    #[test]
    fn power_laws_give_their_exponent(p in -3.0f64..3.0, c in 1e-3f64..1e3) {
        let x = [0.5, 0.25, 0.125, 0.0625];
        let y: Vec<f64> = x.iter().map(|&h: &f64| c * h.powf(p)).collect();
        prop_assert!((loglog_slope(&x, &y).unwrap() - p).abs() < 1e-10);
    }
}

/// Converts a legacy VTK unstructured grid back to the plain-text mesh format.
fn vtk_to_text(vtk: &str) -> (String, Vec<f64>) {
    let lines: Vec<&str> = vtk.lines().collect();
    let find = |key: &str| lines.iter().position(|l| l.starts_with(key)).unwrap();
    let count = |i: usize| lines[i].split_whitespace().nth(1).unwrap().parse::<usize>().unwrap();
    let (pi, ci) = (find("POINTS"), find("CELLS"));
    let (np, nc) = (count(pi), count(ci));
    let mut text = format!("tetmesh {np} {nc}\n");
    for l in &lines[pi + 1..pi + 1 + np] {
        text.push_str(l);
        text.push('\n');
    }
    for l in &lines[ci + 1..ci + 1 + nc] {
        let ids: Vec<&str> = l.split_whitespace().skip(1).collect();
        text.push_str(&format!("{} 0\n", ids.join(" ")));
    }
    let di = find("LOOKUP_TABLE");
    let values = lines[di + 1..].iter().map(|l| l.trim().parse().unwrap()).collect();
    (text, values)
}

#[test]
fn vtk_export_reimports() {
    let domain = zero_dirichlet_cube();
    let mesh = build_box_tet_mesh_with_divisions(&domain, [1, 1, 1]).unwrap();
    assert_eq!(mesh.n_tets(), 6);
    let values: Vec<f64> = mesh.vertices.iter().map(|p| p.x + 10.0 * p.z).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.vtk");
    write_vtk_tet(&path, &mesh, &values).unwrap();
    let vtk = std::fs::read_to_string(&path).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0\n"));
    assert!(vtk.contains("SCALARS hydraulic_head double 1"));
    let (text, read_values) = vtk_to_text(&vtk);
    let raw = parse_tet_mesh::<f64>(&text).unwrap();
    assert_eq!(raw.vertices.len(), mesh.n_vertices());
    assert_eq!(raw.cells, mesh.tets);
    assert_eq!(read_values, values);

    let disc = single();
    let fpath = dir.path().join("f.vtk");
    let h = vec![0.0; disc.h_meshes[0].n_vertices()];
    write_vtk_fracture(&fpath, &disc.h_meshes[0], &disc.network.fractures[0], &h).unwrap();
    let ftext = std::fs::read_to_string(&fpath).unwrap();
    assert!(ftext.contains(&format!("POINTS {} double", disc.h_meshes[0].n_vertices())));
    assert!(ftext.contains(&format!("CELL_TYPES {}", disc.h_meshes[0].n_tris())));
}

#[test]
fn csv_has_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let r = rows(|d| (d * d, d));
    let path = dir.path().join("conv.csv");
    write_convergence_csv(&path, &r).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "level,delta_D,delta_F,errL2_D,errH1_D,errL2_F,errH1_F,iters,functional"
    );
    assert_eq!(lines.len(), 1 + r.len());
    let fields: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(fields[1], r[1].delta_d);
    assert_eq!(fields[3], r[1].err_l2_d);

    let full = dir.path().join("full.csv");
    write_full_norm_csv(&full, &r).unwrap();
    assert_eq!(std::fs::read_to_string(&full).unwrap().lines().count(), 1 + r.len());
}
