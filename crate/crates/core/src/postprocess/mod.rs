//! Error norms, convergence rates and field export.

mod analytic;
mod export;
mod norms;
mod rates;

pub use analytic::AnalyticSolution;
pub use export::{write_convergence_csv, write_full_norm_csv, write_vtk_fracture, write_vtk_tet};
pub use norms::{error_norms, ErrorNorms};
pub use rates::{fit_rates, loglog_slope, ConvergenceRow, Rates};
