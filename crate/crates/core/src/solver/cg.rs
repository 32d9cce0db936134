//! Conjugate gradient on the reduced problem `𝒢w + g = 0`.

use std::time::{Duration, Instant};

use super::reduced::{LaggedHessian, ReducedProblem};
use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, norm2};
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgVariant {
    /// Exact `𝒢` application with block forward/backward substitution.
    Coupled,
    /// Matrix-to-fracture coupling lagged by one iteration so `A_D` and `A_F` solve concurrently.
    BetaLagged,
}

impl CgVariant {
    pub fn name(self) -> &'static str {
        match self {
            CgVariant::Coupled => "coupled",
            CgVariant::BetaLagged => "beta_lagged",
        }
    }
}

impl std::str::FromStr for CgVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coupled" => Ok(CgVariant::Coupled),
            "beta_lagged" => Ok(CgVariant::BetaLagged),
            _ => Err(Error::InvalidParameter(format!("unknown CG variant '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CgOptions<T> {
    /// Stop when `‖γ_k‖ / ‖γ_0‖ ≤ tol`.
    pub tol: T,
    pub max_iter: usize,
    pub variant: CgVariant,
    /// Reset the direction to `−γ` every this many iterations; 0 disables.
    pub restart: usize,
    /// Recompute `𝒢w + g` every this many iterations and restart from it when the
    /// recursive gradient has drifted by more than `0.1 · tol · ‖γ_0‖`; 0 disables.
    pub drift_check: usize,
    pub verbose: bool,
}

impl<T: Scalar> Default for CgOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-8),
            max_iter: 5000,
            variant: CgVariant::Coupled,
            restart: 0,
            drift_check: 50,
            verbose: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgStatus {
    Converged,
    MaxIterReached,
}

/// Iteration data of one CG run.
#[derive(Clone, Debug)]
pub struct CgState<T> {
    pub w: Vec<T>,
    pub gamma: Vec<T>,
    pub d: Vec<T>,
    pub iteration: usize,
    /// `‖γ_k‖ / ‖γ_0‖` for k = 0, 1, ...
    pub residuals: Vec<T>,
    /// Reduced functional `𝒥*(w_k)`.
    pub functionals: Vec<T>,
    pub steps: Vec<T>,
    /// Smallest `dᵀ𝒢d / dᵀd` seen.
    pub min_curvature: T,
    /// Number of drift checks that replaced the recursive gradient.
    pub drift_corrections: usize,
    /// Largest `‖γ_k − (𝒢w_k + g)‖ / ‖γ_0‖` seen by the drift checks.
    pub max_drift: T,
    pub status: CgStatus,
    /// `‖𝒢w + g‖ / ‖g‖` recomputed with the exact operator at exit.
    pub true_residual: T,
    pub elapsed: Duration,
}

/// Runs CG from `w_0 = 0` given the gradient offset `g` and constant term of `𝒥*`.
pub fn reduced_cg<T: Scalar>(
    problem: &ReducedProblem<'_, T>,
    g: &[T],
    constant: T,
    opts: &CgOptions<T>,
) -> Result<CgState<T>> {
    if !(opts.tol > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "CG tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let start = Instant::now();
    let n = g.len();
    let mut lagged = LaggedHessian::new(problem);
    let mut apply = |d: &[T]| -> Result<Vec<T>> {
        match opts.variant {
            CgVariant::Coupled => problem.apply_hessian(d),
            CgVariant::BetaLagged => lagged.apply(d),
        }
    };

    let mut w = vec![T::zero(); n];
    let mut gamma = g.to_vec();
    let mut d: Vec<T> = gamma.iter().map(|&v| -v).collect();
    let g0 = norm2(&gamma);
    let mut gg = dot(&gamma, &gamma);
    let mut state = CgState {
        w: Vec::new(),
        gamma: Vec::new(),
        d: Vec::new(),
        iteration: 0,
        residuals: Vec::new(),
        functionals: vec![constant],
        steps: Vec::new(),
        min_curvature: T::infinity(),
        drift_corrections: 0,
        max_drift: T::zero(),
        status: CgStatus::Converged,
        true_residual: T::zero(),
        elapsed: Duration::ZERO,
    };
    let mut j = constant;
    let mut k = 0;
    loop {
        let rel = if g0 > T::zero() { gg.sqrt() / g0 } else { T::zero() };
        state.residuals.push(rel);
        if opts.verbose {
            println!("iter {k} residual {:.6e} functional {:.10e}", rel.as_f64(), j.as_f64());
        }
        if rel <= opts.tol {
            break;
        }
        if k >= opts.max_iter {
            state.status = CgStatus::MaxIterReached;
            break;
        }
        let y = apply(&d)?;
        let dy = dot(&d, &y);
        let dd = dot(&d, &d);
        if !(dy > T::zero()) {
            return Err(Error::NonPositiveCurvature {
                iteration: k,
                value: dy.as_f64(),
            });
        }
        state.min_curvature = state.min_curvature.min(dy / dd);
        let zeta = gg / dy;
        j = j + T::lit(2.0) * zeta * dot(&gamma, &d) + zeta * zeta * dy;
        axpy(zeta, &d, &mut w);
        axpy(zeta, &y, &mut gamma);
        state.steps.push(zeta);
        state.functionals.push(j);
        k += 1;

        let mut restart = opts.restart > 0 && k % opts.restart == 0;
        if opts.drift_check > 0 && k % opts.drift_check == 0 {
            let mut exact = problem.apply_hessian(&w)?;
            axpy(T::one(), g, &mut exact);
            let diff: Vec<T> = exact.iter().zip(&gamma).map(|(&a, &b)| a - b).collect();
            let drift = norm2(&diff) / g0;
            state.max_drift = state.max_drift.max(drift);
            if drift > T::lit(0.1) * opts.tol {
                gamma = exact;
                state.drift_corrections += 1;
                restart = true;
            }
        }
        let gg_new = dot(&gamma, &gamma);
        if restart {
            d = gamma.iter().map(|&v| -v).collect();
        } else {
            let theta = gg_new / gg;
            for (di, &gi) in d.iter_mut().zip(&gamma) {
                *di = -gi + theta * *di;
            }
        }
        gg = gg_new;
    }
    state.iteration = k;
    state.true_residual = if g0 > T::zero() {
        let mut exact = problem.apply_hessian(&w)?;
        axpy(T::one(), g, &mut exact);
        norm2(&exact) / g0
    } else {
        T::zero()
    };
    state.w = w;
    state.gamma = gamma;
    state.d = d;
    state.elapsed = start.elapsed();
    Ok(state)
}
