//! Independent ground truth for tests and the `verify` command:
//! exhaustive active-set enumeration for small contact QPs, a dense
//! Jacobi eigensolver, and a seeded random instance generator.
//!
//! Nothing here reuses the Cholesky/solver code paths, so agreement with
//! the main solvers cross-validates both.

use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix, SymMatrix};
use crate::problem::ContactQp;
use rand::Rng;

const KKT_TOL: f64 = 1e-10;
const MAX_ENUM_CONSTRAINTS: usize = 12;

/// Exact solution of a small contact QP found by enumeration.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub u: Vec<f64>,
    pub r: Vec<f64>,
    /// Indices (0-based) of constraints active at the optimum.
    pub active_set: Vec<usize>,
    pub optimal_value: f64,
}

/// Solves the QP exactly by enumerating every candidate active set and
/// solving the corresponding equality-constrained KKT system with a
/// pivoted LU factorization. Requires `m <= 12`.
pub fn active_set_solve(qp: &ContactQp) -> Result<OracleSolution> {
    let d = qp.dim();
    let m = qp.ncon();
    if m > MAX_ENUM_CONSTRAINTS {
        return Err(Error::TooManyConstraints { m });
    }
    let k = qp.stiffness();
    let n = qp.constraint_matrix();
    let p = qp.load();
    let h = qp.gap_offset();

    for mask in 0u32..(1u32 << m) {
        let active: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let na = active.len();
        let size = d + na;

        // [[K, N_A^T], [N_A, 0]] (u, lambda) = (p, h_A), lambda = -r_A
        let mut a = vec![0.0; size * size];
        let mut b = vec![0.0; size];
        for i in 0..d {
            for j in 0..d {
                a[i * size + j] = k.get(i, j);
            }
            b[i] = p[i];
        }
        for (ai, &ci) in active.iter().enumerate() {
            for j in 0..d {
                let v = n.get(ci, j);
                a[j * size + (d + ai)] = v;
                a[(d + ai) * size + j] = v;
            }
            b[d + ai] = h[ci];
        }

        // singular KKT systems (dependent active rows) are skipped;
        // another subset certifies the optimum for strictly convex QPs
        let Some(sol) = lu_solve(a, size, &b) else {
            continue;
        };
        let u = sol[..d].to_vec();
        let mut r = vec![0.0; m];
        for (ai, &ci) in active.iter().enumerate() {
            r[ci] = -sol[d + ai];
        }
        if r.iter().any(|&ri| ri > KKT_TOL) {
            continue;
        }
        let gap = qp.gap(&u)?;
        if gap.iter().any(|&g| g < -KKT_TOL) {
            continue;
        }
        let ku = k.matvec(&u)?;
        let optimal_value = 0.5 * dot(&u, &ku) - dot(p, &u);
        return Ok(OracleSolution {
            u,
            r,
            active_set: active,
            optimal_value,
        });
    }
    Err(Error::NoFeasibleSubset)
}

/// Dense LU with partial pivoting; returns `None` for (numerically)
/// singular systems.
fn lu_solve(mut a: Vec<f64>, n: usize, b: &[f64]) -> Option<Vec<f64>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let scale = a.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    let pivot_floor = 1e-12 * scale.max(1.0);
    let mut x = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot_val) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .max_by(|l, r| l.1.total_cmp(&r.1))?;
        if pivot_val <= pivot_floor {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            x.swap(col, pivot_row);
        }
        let inv = 1.0 / a[col * n + col];
        for r in (col + 1)..n {
            let factor = a[r * n + col] * inv;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= factor * a[col * n + j];
            }
            x[r] -= factor * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= a[i * n + j] * x[j];
        }
        x[i] = s / a[i * n + i];
    }
    Some(x)
}

/// All eigenvalues of a small symmetric matrix by cyclic Jacobi
/// rotations, ascending. Intended for `dim <= 64`.
pub fn jacobi_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    let n = m.dim();
    assert!(n <= 64, "jacobi_eigenvalues is limited to dim <= 64");
    let mut a: Vec<f64> = m.as_slice().to_vec();
    let frob = dot(&a, &a).sqrt();
    let target = 1e-12 * frob;

    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Draws a random strictly convex instance with `1 <= d <= max_d`,
/// `1 <= m <= max_m`. The stiffness is `G^T G + d I`; gap offsets are
/// centered on the unconstrained-optimum gaps so active and inactive
/// constraints are both likely.
pub fn random_instance<R: Rng>(rng: &mut R, max_d: usize, max_m: usize) -> ContactQp {
    let d = rng.gen_range(1..=max_d);
    let m = rng.gen_range(1..=max_m);

    let g: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut k = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = if i == j { d as f64 } else { 0.0 };
            for l in 0..d {
                s += g[l * d + i] * g[l * d + j];
            }
            k[i * d + j] = s;
        }
    }
    let stiffness = SymMatrix::from_row_major(d, k).expect("square by construction");

    let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();

    let mut n_entries = vec![0.0; m * d];
    for row in n_entries.chunks_mut(d) {
        loop {
            for v in row.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            if row.iter().any(|&v: &f64| v.abs() > 0.1) {
                break;
            }
        }
    }
    let n = DenseMatrix::from_row_major(m, d, n_entries).expect("sized by construction");

    // anchor the gaps at a point near the unconstrained optimum with
    // strictly positive slack, so the feasible set has an interior while
    // some constraints still end up active at the optimum
    let f = crate::linalg::cholesky_factorize(&stiffness).expect("SPD by construction");
    let u0 = crate::linalg::cholesky_solve(&f, &p).expect("dims match");
    let anchor: Vec<f64> = u0.iter().map(|v| v + rng.gen_range(-0.5..0.5)).collect();
    let na = n.matvec(&anchor).expect("dims match");
    let h: Vec<f64> = na.iter().map(|v| v + rng.gen_range(0.001..1.0)).collect();

    ContactQp::new(stiffness, p, n, h).expect("dims match")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::kkt_residual;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

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
    fn spring_active_set() {
        let sol = active_set_solve(&spring()).unwrap();
        assert_eq!(sol.active_set, vec![0]);
        assert_relative_eq!(sol.u[0], 1.5, max_relative = 1e-12);
        assert_relative_eq!(sol.r[0], -1.0, max_relative = 1e-12);
        assert_relative_eq!(sol.optimal_value, -3.75, max_relative = 1e-12);
    }

    #[test]
    fn inactive_when_gap_large() {
        let qp = ContactQp::new(
            SymMatrix::from_row_major(1, vec![2.0]).unwrap(),
            vec![4.0],
            DenseMatrix::from_row_major(1, 1, vec![1.0]).unwrap(),
            vec![1e6],
        )
        .unwrap();
        let sol = active_set_solve(&qp).unwrap();
        assert!(sol.active_set.is_empty());
        assert_relative_eq!(sol.u[0], 2.0, max_relative = 1e-12);
        assert_eq!(sol.r, vec![0.0]);
    }

    #[test]
    fn rejects_large_m() {
        let m = 13;
        let qp = ContactQp::new(
            SymMatrix::identity(2),
            vec![0.0; 2],
            DenseMatrix::from_row_major(m, 2, vec![1.0; m * 2]).unwrap(),
            vec![1.0; m],
        )
        .unwrap();
        assert!(matches!(
            active_set_solve(&qp),
            Err(Error::TooManyConstraints { m: 13 })
        ));
    }

    #[test]
    fn jacobi_diagonal() {
        let a = SymMatrix::from_row_major(3, vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0])
            .unwrap();
        assert_eq!(jacobi_eigenvalues(&a), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn jacobi_identity() {
        assert_eq!(jacobi_eigenvalues(&SymMatrix::identity(5)), vec![1.0; 5]);
    }

    #[test]
    fn jacobi_2x2() {
        let a = SymMatrix::from_row_major(2, vec![4.0, 2.0, 2.0, 5.0]).unwrap();
        let eigs = jacobi_eigenvalues(&a);
        let lo = (9.0 - 17.0_f64.sqrt()) / 2.0;
        let hi = (9.0 + 17.0_f64.sqrt()) / 2.0;
        assert_relative_eq!(eigs[0], lo, max_relative = 1e-12);
        assert_relative_eq!(eigs[1], hi, max_relative = 1e-12);
    }

    #[test]
    fn random_instances_have_clean_kkt_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let qp = random_instance(&mut rng, 6, 6);
            let sol = active_set_solve(&qp).unwrap();
            let res = kkt_residual(&qp, &sol.u, &sol.r).unwrap();
            assert!(res.total <= 1e-9, "oracle KKT residual {}", res.total);
            assert!(sol.r.iter().all(|&ri| ri <= 1e-12));
            let gap = qp.gap(&sol.u).unwrap();
            assert!(gap.iter().all(|&g| g >= -1e-10));
            for &i in &sol.active_set {
                assert!(gap[i].abs() <= 1e-9);
            }
            // optimal value consistent with the primal objective
            let pi = crate::diagnostics::primal_objective(&qp, &sol.u).unwrap();
            assert_relative_eq!(sol.optimal_value, pi, max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobi_matches_inverse_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let qp = random_instance(&mut rng, 8, 2);
            let k = qp.stiffness();
            let eigs = jacobi_eigenvalues(k);
            let lam = crate::linalg::min_eigenvalue(k, 1e-10, 100_000).unwrap();
            assert_relative_eq!(lam, eigs[0], max_relative = 1e-6);
        }
    }
}
