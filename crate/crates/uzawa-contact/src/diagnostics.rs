//! Objective and residual instrumentation: primal/dual objectives, the
//! four KKT residual blocks, and per-iteration history records.
//!
//! Everything here is evaluated by direct substitution (fresh triangular
//! solves), independent of solver internals.

use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, dot, CholeskyFactor};
use crate::problem::ContactQp;

/// KKT residual blocks of a primal-dual pair `(u, r)`:
/// force balance, primal feasibility, dual feasibility, complementarity.
#[derive(Debug, Clone)]
pub struct KktResidual {
    /// `K u - p - N^T r`
    pub e1: Vec<f64>,
    /// `min{g(u), 0}`
    pub e2: Vec<f64>,
    /// `max{r, 0}`
    pub e3: Vec<f64>,
    /// `-diag(g(u)) r`
    pub e4: Vec<f64>,
    /// Euclidean norm of the concatenation `(e1, e2, e3, e4)`.
    pub total: f64,
}

/// One row of a convergence history.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub k: usize,
    pub dual_obj: f64,
    pub primal_obj: f64,
    pub residual_total: f64,
    /// The stopping-criterion norm of this iteration.
    pub step_norm: f64,
    pub restarted: bool,
}

/// `pi(u) = 1/2 u^T K u - p^T u`
pub fn primal_objective(qp: &ContactQp, u: &[f64]) -> Result<f64> {
    if u.len() != qp.dim() {
        return Err(Error::DimensionMismatch {
            context: "primal_objective",
            expected: qp.dim(),
            found: u.len(),
        });
    }
    let ku = qp.stiffness().matvec(u)?;
    Ok(0.5 * dot(u, &ku) - dot(qp.load(), u))
}

/// Lagrange dual function `psi(r) = pi(u_r) + r^T (h - N u_r)` with
/// `u_r = K^{-1} (p + N^T r)`.
pub fn dual_objective(factor: &CholeskyFactor, qp: &ContactQp, r: &[f64]) -> Result<f64> {
    let u = displacement_at(factor, qp, r)?;
    let gap = qp.gap(&u)?;
    Ok(primal_objective(qp, &u)? + dot(r, &gap))
}

/// Equilibrium displacement at fixed reactions: `u = K^{-1} (p + N^T r)`.
pub fn displacement_at(factor: &CholeskyFactor, qp: &ContactQp, r: &[f64]) -> Result<Vec<f64>> {
    if r.len() != qp.ncon() {
        return Err(Error::DimensionMismatch {
            context: "displacement_at",
            expected: qp.ncon(),
            found: r.len(),
        });
    }
    let ntr = qp.constraint_matrix().matvec_transpose(r)?;
    let rhs: Vec<f64> = qp.load().iter().zip(&ntr).map(|(p, c)| p + c).collect();
    cholesky_solve(factor, &rhs)
}

/// The four KKT residual blocks at an arbitrary pair `(u, r)`.
pub fn kkt_residual(qp: &ContactQp, u: &[f64], r: &[f64]) -> Result<KktResidual> {
    if u.len() != qp.dim() {
        return Err(Error::DimensionMismatch {
            context: "kkt_residual u",
            expected: qp.dim(),
            found: u.len(),
        });
    }
    if r.len() != qp.ncon() {
        return Err(Error::DimensionMismatch {
            context: "kkt_residual r",
            expected: qp.ncon(),
            found: r.len(),
        });
    }
    let ku = qp.stiffness().matvec(u)?;
    let ntr = qp.constraint_matrix().matvec_transpose(r)?;
    let e1: Vec<f64> = ku
        .iter()
        .zip(qp.load())
        .zip(&ntr)
        .map(|((ku, p), ntr)| ku - p - ntr)
        .collect();
    let gap = qp.gap(u)?;
    let e2: Vec<f64> = gap.iter().map(|&g| g.min(0.0)).collect();
    let e3: Vec<f64> = r.iter().map(|&ri| ri.max(0.0)).collect();
    let e4: Vec<f64> = gap.iter().zip(r).map(|(&g, &ri)| -g * ri).collect();
    let total = (dot(&e1, &e1) + dot(&e2, &e2) + dot(&e3, &e3) + dot(&e4, &e4)).sqrt();
    Ok(KktResidual { e1, e2, e3, e4, total })
}

/// Builds one history row for reactions `r` (one extra linear solve).
pub fn record_iteration(
    factor: &CholeskyFactor,
    qp: &ContactQp,
    r: &[f64],
    k: usize,
    step_norm: f64,
    restarted: bool,
) -> Result<IterationRecord> {
    let u = displacement_at(factor, qp, r)?;
    let gap = qp.gap(&u)?;
    let primal_obj = primal_objective(qp, &u)?;
    let dual_obj = primal_obj + dot(r, &gap);
    let residual_total = kkt_residual(qp, &u, r)?.total;
    Ok(IterationRecord {
        k,
        dual_obj,
        primal_obj,
        residual_total,
        step_norm,
        restarted,
    })
}

/// Serializes a history to CSV: `k,dual_obj,primal_obj,residual_total,
/// step_norm,restarted` with full-precision (round-trip) decimals and
/// `restarted` as 0/1.
pub fn history_to_csv(history: &[IterationRecord]) -> String {
    let mut out = String::from("k,dual_obj,primal_obj,residual_total,step_norm,restarted\n");
    for rec in history {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            rec.k,
            rec.dual_obj,
            rec.primal_obj,
            rec.residual_total,
            rec.step_norm,
            u8::from(rec.restarted),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cholesky_factorize, DenseMatrix, SymMatrix};
    use approx::assert_relative_eq;

    // 1-DOF spring: K = [[2]], p = (4), N = [[1]], h = (1.5)
    fn spring() -> ContactQp {
        ContactQp::new(
            SymMatrix::from_row_major(1, vec![2.0]).unwrap(),
            vec![4.0],
            DenseMatrix::from_row_major(1, 1, vec![1.0]).unwrap(),
            vec![1.5],
        )
        .unwrap()
    }

    #[test]
    fn primal_objective_values() {
        let qp = spring();
        assert_eq!(primal_objective(&qp, &[0.0]).unwrap(), 0.0);
        assert_relative_eq!(primal_objective(&qp, &[2.0]).unwrap(), -4.0);
        assert_relative_eq!(primal_objective(&qp, &[1.5]).unwrap(), -3.75);
    }

    #[test]
    fn dual_objective_values() {
        let qp = spring();
        let f = cholesky_factorize(qp.stiffness()).unwrap();
        // r = 0: unconstrained minimum value
        assert_relative_eq!(dual_objective(&f, &qp, &[0.0]).unwrap(), -4.0);
        // r = -1: u_r = 1.5, zero gap, matches primal optimum
        assert_relative_eq!(dual_objective(&f, &qp, &[-1.0]).unwrap(), -3.75);
    }

    #[test]
    fn kkt_residual_at_solution() {
        let qp = spring();
        let res = kkt_residual(&qp, &[1.5], &[-1.0]).unwrap();
        assert_eq!(res.total, 0.0);
    }

    #[test]
    fn kkt_residual_unconstrained_point() {
        let qp = spring();
        let res = kkt_residual(&qp, &[2.0], &[0.0]).unwrap();
        assert_eq!(res.e1, vec![0.0]);
        assert_eq!(res.e2, vec![-0.5]);
        assert_eq!(res.e3, vec![0.0]);
        assert_eq!(res.e4, vec![0.0]);
        assert_relative_eq!(res.total, 0.5);
    }

    #[test]
    fn kkt_residual_positive_reaction() {
        let qp = spring();
        // closed gap (u = 1.5) but adhesive reaction
        let res = kkt_residual(&qp, &[1.5], &[0.3]).unwrap();
        assert_eq!(res.e3, vec![0.3]);
        assert!(res.total >= 0.3);
    }

    #[test]
    fn complementarity_zero_cases() {
        let qp = spring();
        // r = 0 forces e4 = 0 regardless of gap
        let res = kkt_residual(&qp, &[0.7], &[0.0]).unwrap();
        assert_eq!(res.e4, vec![0.0]);
        // zero gap forces e4 = 0 regardless of r
        let res = kkt_residual(&qp, &[1.5], &[-2.0]).unwrap();
        assert_eq!(res.e4, vec![0.0]);
    }

    #[test]
    fn csv_schema() {
        let rec = IterationRecord {
            k: 0,
            dual_obj: -4.0,
            primal_obj: -4.0,
            residual_total: 0.5,
            step_norm: 0.25,
            restarted: false,
        };
        let csv = history_to_csv(&[rec]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "k,dual_obj,primal_obj,residual_total,step_norm,restarted"
        );
        assert_eq!(lines.next().unwrap(), "0,-4,-4,0.5,0.25,0");
    }
}
