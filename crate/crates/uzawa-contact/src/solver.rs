//! Dual-ascent solvers over a `ContactQp`: the classic Uzawa method and
//! its accelerated variant with optional adaptive restart. All three run
//! on the Lagrangian dual
//!
//!   maximize psi(r)  subject to  r <= 0
//!
//! with a fixed step size, factorizing the stiffness matrix once.

use crate::diagnostics::{record_iteration, IterationRecord};
use crate::error::{Error, Result};
use crate::linalg::{
    cholesky_factorize, cholesky_solve, dot, max_singular_value, min_eigenvalue, norm2,
    CholeskyFactor,
};
use crate::problem::ContactQp;

/// Which dual method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Uzawa,
    Accelerated,
    AcceleratedRestart,
}

/// Dual gradient step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `lambda_1(K) / sigma_max(N)^2`, the midpoint of the convergent
    /// interval, computed from the instance.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: Method,
    pub alpha: StepSize,
    pub epsilon: f64,
    pub max_iter: usize,
    pub record_history: bool,
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        SolverConfig {
            method,
            alpha: StepSize::Auto,
            epsilon: 1e-6,
            max_iter: 100_000,
            record_history: false,
        }
    }

    fn validate(&self) {
        assert!(self.epsilon > 0.0, "epsilon must be positive");
        assert!(self.max_iter >= 1, "max_iter must be at least 1");
        if let StepSize::Fixed(a) = self.alpha {
            assert!(a > 0.0, "explicit step size must be positive");
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterReached,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Displacements at the final reactions, `u = K^{-1}(p + N^T r)`.
    pub u: Vec<f64>,
    /// Final reactions, nonpositive componentwise.
    pub r: Vec<f64>,
    pub status: SolveStatus,
    /// Number of dual updates performed.
    pub iterations: usize,
    /// Step size actually used.
    pub alpha: f64,
    /// Per-iteration telemetry, empty unless `record_history` was set.
    pub history: Vec<IterationRecord>,
}

/// Componentwise projection onto the nonpositive orthant.
pub fn project_nonpositive(y: &[f64]) -> Vec<f64> {
    y.iter().map(|&v| v.min(0.0)).collect()
}

/// One momentum update: `tau_next = (1 + sqrt(1 + 4 tau^2)) / 2`,
/// `omega_next = (tau - 1) / tau_next`.
pub fn tau_update(tau: f64) -> (f64, f64) {
    debug_assert!(tau >= 1.0);
    let tau_next = 0.5 * (1.0 + (1.0 + 4.0 * tau * tau).sqrt());
    let omega_next = (tau - 1.0) / tau_next;
    (tau_next, omega_next)
}

/// Dual gradient at `rho`: solves `K u = p + N^T rho` and returns
/// `(u, gamma)` with `gamma = h - N u = grad psi(rho)`.
pub fn dual_gradient(
    factor: &CholeskyFactor,
    qp: &ContactQp,
    rho: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if rho.len() != qp.ncon() {
        return Err(Error::DimensionMismatch {
            context: "dual_gradient",
            expected: qp.ncon(),
            found: rho.len(),
        });
    }
    let ntr = qp.constraint_matrix().matvec_transpose(rho)?;
    let rhs: Vec<f64> = qp.load().iter().zip(&ntr).map(|(p, c)| p + c).collect();
    let u = cholesky_solve(factor, &rhs)?;
    let gamma = qp.gap(&u)?;
    Ok((u, gamma))
}

/// Midpoint of the provably convergent step-size interval,
/// `alpha = lambda_1(K) / sigma_max(N)^2`.
pub fn default_step_size(qp: &ContactQp) -> Result<f64> {
    let lambda = min_eigenvalue(qp.stiffness(), 1e-8, 10_000)?;
    let sigma = max_singular_value(qp.constraint_matrix(), 1e-8, 10_000)?;
    Ok(lambda / (sigma * sigma))
}

/// True iff `0 < alpha < 2 lambda_1(K) / sigma_max(N)^2` (open interval).
pub fn step_size_validity_check(qp: &ContactQp, alpha: f64) -> Result<bool> {
    let bound = 2.0 * default_step_size(qp)?;
    Ok(alpha > 0.0 && alpha < bound)
}

fn resolve_alpha(qp: &ContactQp, cfg: &SolverConfig) -> Result<f64> {
    match cfg.alpha {
        StepSize::Auto => default_step_size(qp),
        StepSize::Fixed(a) => Ok(a),
    }
}

/// Runs the configured method from `r0` (all zeros when `None`).
pub fn solve(qp: &ContactQp, cfg: &SolverConfig, r0: Option<&[f64]>) -> Result<SolveResult> {
    let zero;
    let r0 = match r0 {
        Some(r) => r,
        None => {
            zero = vec![0.0; qp.ncon()];
            &zero
        }
    };
    match cfg.method {
        Method::Uzawa => uzawa_solve(qp, cfg, r0),
        Method::Accelerated => accelerated_solve(qp, cfg, r0, false),
        Method::AcceleratedRestart => accelerated_solve(qp, cfg, r0, true),
    }
}

/// Classic Uzawa iteration `r_{k+1} = min{0, r_k + alpha * g(u_k)}`,
/// stopping at `||r_k - r_{k+1}|| <= epsilon`.
pub fn uzawa_solve(qp: &ContactQp, cfg: &SolverConfig, r0: &[f64]) -> Result<SolveResult> {
    cfg.validate();
    debug_assert!(r0.iter().all(|&ri| ri <= 0.0), "r0 must be dual feasible");
    let factor = cholesky_factorize(qp.stiffness())?;
    let alpha = resolve_alpha(qp, cfg)?;

    let mut r = r0.to_vec();
    let mut history = Vec::new();
    let mut status = SolveStatus::MaxIterReached;
    let mut iterations = cfg.max_iter;

    for k in 0..cfg.max_iter {
        let (_, gamma) = dual_gradient(&factor, qp, &r)?;
        let stepped: Vec<f64> = r.iter().zip(&gamma).map(|(ri, gi)| ri + alpha * gi).collect();
        let r_next = project_nonpositive(&stepped);
        let step_norm = diff_norm(&r, &r_next);
        if cfg.record_history {
            history.push(record_iteration(&factor, qp, &r_next, k, step_norm, false)?);
        }
        r = r_next;
        if step_norm <= cfg.epsilon {
            status = SolveStatus::Converged;
            iterations = k + 1;
            break;
        }
    }

    finish(&factor, qp, r, status, iterations, alpha, history)
}

/// Accelerated Uzawa: projected gradient steps from the extrapolated
/// point `rho`, momentum from the tau-recursion, and (optionally) an
/// adaptive restart whenever the momentum direction makes an obtuse
/// angle with the dual gradient. Stops at `||rho_k - r_{k+1}|| <= epsilon`.
pub fn accelerated_solve(
    qp: &ContactQp,
    cfg: &SolverConfig,
    r0: &[f64],
    restart: bool,
) -> Result<SolveResult> {
    cfg.validate();
    debug_assert!(r0.iter().all(|&ri| ri <= 0.0), "r0 must be dual feasible");
    let factor = cholesky_factorize(qp.stiffness())?;
    let alpha = resolve_alpha(qp, cfg)?;

    let mut r = r0.to_vec();
    let mut rho = r0.to_vec();
    let mut tau = 1.0_f64;
    let mut history = Vec::new();
    let mut status = SolveStatus::MaxIterReached;
    let mut iterations = cfg.max_iter;

    for k in 0..cfg.max_iter {
        let (_, gamma) = dual_gradient(&factor, qp, &rho)?;
        let stepped: Vec<f64> = rho.iter().zip(&gamma).map(|(pi, gi)| pi + alpha * gi).collect();
        let r_next = project_nonpositive(&stepped);
        let step_norm = diff_norm(&rho, &r_next);

        let momentum: Vec<f64> = r_next.iter().zip(&r).map(|(a, b)| a - b).collect();
        let (tau_next, omega_next) = tau_update(tau);
        let restarted = restart && dot(&gamma, &momentum) < 0.0;
        if restarted {
            rho = r_next.clone();
            tau = 1.0;
        } else {
            rho = r_next
                .iter()
                .zip(&momentum)
                .map(|(ri, mi)| ri + omega_next * mi)
                .collect();
            tau = tau_next;
        }

        if cfg.record_history {
            history.push(record_iteration(&factor, qp, &r_next, k, step_norm, restarted)?);
        }
        r = r_next;
        if step_norm <= cfg.epsilon {
            status = SolveStatus::Converged;
            iterations = k + 1;
            break;
        }
    }

    finish(&factor, qp, r, status, iterations, alpha, history)
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&d)
}

fn finish(
    factor: &CholeskyFactor,
    qp: &ContactQp,
    r: Vec<f64>,
    status: SolveStatus,
    iterations: usize,
    alpha: f64,
    history: Vec<IterationRecord>,
) -> Result<SolveResult> {
    // recompute u at the final reactions so force balance holds exactly
    // up to the linear solve
    let (u, _) = dual_gradient(factor, qp, &r)?;
    Ok(SolveResult {
        u,
        r,
        status,
        iterations,
        alpha,
        history,
    })
}
