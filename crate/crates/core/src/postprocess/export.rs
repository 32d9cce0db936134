//! Legacy VTK and CSV output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::rates::ConvergenceRow;
use crate::error::Result;
use crate::geometry::{Fracture, Vec3};
use crate::mesh::{TetMesh, TriMesh};
use crate::Scalar;

fn write_vtk<T: Scalar, const N: usize>(
    path: &Path,
    title: &str,
    points: &[Vec3<T>],
    cells: &[[usize; N]],
    cell_type: u8,
    values: &[T],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", points.len())?;
    for p in points {
        writeln!(w, "{:.17e} {:.17e} {:.17e}", p.x.as_f64(), p.y.as_f64(), p.z.as_f64())?;
    }
    writeln!(w, "CELLS {} {}", cells.len(), cells.len() * (N + 1))?;
    for c in cells {
        write!(w, "{N}")?;
        for v in c {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_TYPES {}", cells.len())?;
    for _ in cells {
        writeln!(w, "{cell_type}")?;
    }
    writeln!(w, "POINT_DATA {}", points.len())?;
    writeln!(w, "SCALARS hydraulic_head double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for v in values {
        writeln!(w, "{:.17e}", v.as_f64())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_vtk_tet<T: Scalar>(path: &Path, mesh: &TetMesh<T>, values: &[T]) -> Result<()> {
    write_vtk(path, "porous matrix head", &mesh.vertices, &mesh.tets, 10, values)
}

/// Writes a fracture mesh in 3D coordinates.
pub fn write_vtk_fracture<T: Scalar>(
    path: &Path,
    mesh: &TriMesh<T>,
    fracture: &Fracture<T>,
    values: &[T],
) -> Result<()> {
    let pts: Vec<Vec3<T>> = mesh.vertices.iter().map(|&p| fracture.frame.from_local(p)).collect();
    write_vtk(
        path,
        &format!("fracture {} head", fracture.id),
        &pts,
        &mesh.tris,
        5,
        values,
    )
}

pub fn write_convergence_csv<T: Scalar>(path: &Path, rows: &[ConvergenceRow<T>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", ConvergenceRow::<T>::CSV_HEADER)?;
    for r in rows {
        writeln!(w, "{}", r.csv_line())?;
    }
    w.flush()?;
    Ok(())
}

/// Companion table with full H1 norms (`sqrt(L2² + seminorm²)`).
pub fn write_full_norm_csv<T: Scalar>(path: &Path, rows: &[ConvergenceRow<T>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "level,delta_D,delta_F,errH1full_D,errH1full_F")?;
    for r in rows {
        let full = |a: T, b: T| (a * a + b * b).sqrt().as_f64();
        writeln!(
            w,
            "{},{:e},{:e},{:e},{:e}",
            r.level,
            r.delta_d.as_f64(),
            r.delta_f.as_f64(),
            full(r.err_l2_d, r.err_h1_d),
            full(r.err_l2_f, r.err_h1_f)
        )?;
    }
    w.flush()?;
    Ok(())
}
