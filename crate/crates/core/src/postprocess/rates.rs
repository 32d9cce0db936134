//! Convergence tables and rate fits.

use crate::error::{Error, Result};
use crate::Scalar;

/// One level of a refinement study.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow<T> {
    pub level: usize,
    pub delta_d: T,
    pub delta_f: T,
    pub err_l2_d: T,
    pub err_h1_d: T,
    pub err_l2_f: T,
    pub err_h1_f: T,
    pub iterations: usize,
    pub functional: T,
}

impl<T: Scalar> ConvergenceRow<T> {
    pub const CSV_HEADER: &'static str = "level,delta_D,delta_F,errL2_D,errH1_D,errL2_F,errH1_F,iters,functional";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{},{:e}",
            self.level,
            self.delta_d.as_f64(),
            self.delta_f.as_f64(),
            self.err_l2_d.as_f64(),
            self.err_h1_d.as_f64(),
            self.err_l2_f.as_f64(),
            self.err_h1_f.as_f64(),
            self.iterations,
            self.functional.as_f64()
        )
    }
}

/// Log-log slopes of each error column against the mesh size of its own field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates {
    pub l2_d: f64,
    pub h1_d: f64,
    pub l2_f: f64,
    pub h1_f: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 points, got {}", x.len())));
    }
    if let Some(v) = y.iter().find(|&&v| !(v >= 1e-15)) {
        return Err(Error::DegenerateFit(format!("error value {v:e} below 1e-15")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("mesh sizes are all equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

pub fn fit_rates<T: Scalar>(rows: &[ConvergenceRow<T>]) -> Result<Rates> {
    let col = |f: &dyn Fn(&ConvergenceRow<T>) -> T| rows.iter().map(|r| f(r).as_f64()).collect::<Vec<_>>();
    let dd = col(&|r| r.delta_d);
    let df = col(&|r| r.delta_f);
    Ok(Rates {
        l2_d: loglog_slope(&dd, &col(&|r| r.err_l2_d))?,
        h1_d: loglog_slope(&dd, &col(&|r| r.err_h1_d))?,
        l2_f: loglog_slope(&df, &col(&|r| r.err_l2_f))?,
        h1_f: loglog_slope(&df, &col(&|r| r.err_h1_f))?,
    })
}
