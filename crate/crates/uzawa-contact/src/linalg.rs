//! Dense linear algebra kernel: SPD factorization, triangular solves,
//! matrix-vector products and extremal eigen/singular value estimation.
//!
//! Everything is stored dense and row-major. Matrices are immutable after
//! construction, so all operations here are safe to call concurrently.

use crate::error::{Error, Result};

/// Dense symmetric matrix, full square row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from full row-major storage.
    /// Symmetry is enforced by averaging `(a_ij + a_ji) / 2`.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Result<Self> {
        assert!(dim >= 1, "SymMatrix requires dim >= 1");
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                context: "SymMatrix::from_row_major",
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let mut m = SymMatrix { dim, entries };
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = 0.5 * (m.entries[i * dim + j] + m.entries[j * dim + i]);
                m.entries[i * dim + j] = avg;
                m.entries[j * dim + i] = avg;
            }
        }
        Ok(m)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        SymMatrix {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Adds `v` to both `(i, j)` and `(j, i)`; adds once on the diagonal.
    pub fn add_symmetric(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] += v;
        if i != j {
            self.entries[j * self.dim + i] += v;
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "SymMatrix::matvec",
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(row_major_matvec(&self.entries, self.dim, self.dim, x))
    }
}

/// Dense rectangular matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        assert!(rows >= 1 && cols >= 1, "DenseMatrix requires rows, cols >= 1");
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "DenseMatrix::from_row_major",
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(DenseMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1);
        DenseMatrix {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    /// `y = M x`
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "DenseMatrix::matvec",
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok(row_major_matvec(&self.entries, self.rows, self.cols, x))
    }

    /// `y = M^T x`
    pub fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "DenseMatrix::matvec_transpose",
                expected: self.rows,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            for (yj, &mij) in y.iter_mut().zip(row) {
                *yj += mij * xi;
            }
        }
        Ok(y)
    }
}

fn row_major_matvec(entries: &[f64], rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; rows];
    for i in 0..rows {
        let row = &entries[i * cols..(i + 1) * cols];
        y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    y
}

/// Lower-triangular Cholesky factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    /// Row-major lower triangle, full square storage (upper part zero).
    lower: Vec<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.dim + j]
    }
}

/// Cholesky factorization of a symmetric positive definite matrix.
///
/// Fails with `NotPositiveDefinite` when a pivot drops below
/// `1e-14 * max(diag)`, e.g. for a stiffness matrix with missing
/// boundary conditions.
pub fn cholesky_factorize(a: &SymMatrix) -> Result<CholeskyFactor> {
    let n = a.dim;
    let max_diag = (0..n).map(|i| a.get(i, i)).fold(0.0_f64, f64::max);
    let pivot_floor = 1e-14 * max_diag;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut diag = a.get(j, j);
        for k in 0..j {
            diag -= l[j * n + k] * l[j * n + k];
        }
        if diag <= pivot_floor {
            return Err(Error::NotPositiveDefinite { pivot_index: j });
        }
        let ljj = diag.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    Ok(CholeskyFactor { dim: n, lower: l })
}

/// Solves `L L^T x = b` by forward and backward substitution.
pub fn cholesky_solve(factor: &CholeskyFactor, b: &[f64]) -> Result<Vec<f64>> {
    let n = factor.dim;
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "cholesky_solve",
            expected: n,
            found: b.len(),
        });
    }
    let l = &factor.lower;
    // forward: L y = b
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    // backward: L^T x = y
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Ok(x)
}

const RESTART_PERTURBATION: f64 = 1e-3;

/// Minimum eigenvalue of an SPD matrix by inverse power iteration.
///
/// Each step is one pair of triangular solves against the Cholesky factor.
/// The start vector is deterministic (normalized all-ones); if the iterate
/// collapses to zero the first component is perturbed and the iteration
/// restarted once.
pub fn min_eigenvalue(a: &SymMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    let factor = cholesky_factorize(a)?;
    let n = a.dim;
    let start = vec![1.0 / (n as f64).sqrt(); n];
    match inverse_iteration(a, &factor, start, tol, max_iter) {
        Ok(lambda) => Ok(lambda),
        Err(Error::ZeroMatrix) => {
            let mut start = vec![1.0; n];
            start[0] += RESTART_PERTURBATION;
            normalize(&mut start);
            inverse_iteration(a, &factor, start, tol, max_iter)
        }
        Err(e) => Err(e),
    }
}

fn inverse_iteration(
    a: &SymMatrix,
    factor: &CholeskyFactor,
    mut v: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut lambda_prev = f64::INFINITY;
    for _ in 0..max_iter {
        let w = cholesky_solve(factor, &v)?;
        let norm = norm2(&w);
        if norm <= f64::MIN_POSITIVE {
            // start vector orthogonal to the target eigenvector
            return Err(Error::ZeroMatrix);
        }
        v = w;
        let inv = 1.0 / norm;
        for vi in v.iter_mut() {
            *vi *= inv;
        }
        let av = a.matvec(&v)?;
        let lambda = dot(&v, &av);
        if (lambda - lambda_prev).abs() <= tol * lambda.abs() {
            return Ok(lambda);
        }
        lambda_prev = lambda;
    }
    Err(Error::NoConvergence { max_iter })
}

/// Maximum singular value of `N` by power iteration on the Gram matrix
/// `N N^T` (m x m; in the benchmark m << d).
pub fn max_singular_value(n: &DenseMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    let m = n.rows;
    if n.entries.iter().all(|&e| e == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    // gram = N N^T
    let mut gram = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let ri = &n.entries[i * n.cols..(i + 1) * n.cols];
            let rj = &n.entries[j * n.cols..(j + 1) * n.cols];
            let v = dot(ri, rj);
            gram[i * m + j] = v;
            gram[j * m + i] = v;
        }
    }
    let start = vec![1.0 / (m as f64).sqrt(); m];
    match gram_power_iteration(&gram, m, start, tol, max_iter) {
        Ok(lambda) => Ok(lambda.sqrt()),
        Err(Error::ZeroMatrix) => {
            let mut start = vec![1.0; m];
            start[0] += RESTART_PERTURBATION;
            normalize(&mut start);
            gram_power_iteration(&gram, m, start, tol, max_iter).map(f64::sqrt)
        }
        Err(e) => Err(e),
    }
}

fn gram_power_iteration(
    gram: &[f64],
    m: usize,
    mut v: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut lambda_prev = f64::INFINITY;
    for _ in 0..max_iter {
        let w = row_major_matvec(gram, m, m, &v);
        let norm = norm2(&w);
        if norm <= f64::MIN_POSITIVE {
            return Err(Error::ZeroMatrix);
        }
        v = w;
        let inv = 1.0 / norm;
        for vi in v.iter_mut() {
            *vi *= inv;
        }
        let gv = row_major_matvec(gram, m, m, &v);
        let lambda = dot(&v, &gv);
        if (lambda - lambda_prev).abs() <= tol * lambda.abs() {
            return Ok(lambda);
        }
        lambda_prev = lambda;
    }
    Err(Error::NoConvergence { max_iter })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}

fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    if n > 0.0 {
        for vi in v.iter_mut() {
            *vi /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cholesky_1x1() {
        let a = SymMatrix::from_row_major(1, vec![4.0]).unwrap();
        let f = cholesky_factorize(&a).unwrap();
        assert_eq!(f.lower(0, 0), 2.0);
    }

    #[test]
    fn cholesky_identity() {
        let a = SymMatrix::identity(3);
        let f = cholesky_factorize(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(f.lower(i, j), want);
            }
        }
    }

    #[test]
    fn cholesky_2x2() {
        // [[4,2],[2,5]] = L L^T with L = [[2,0],[1,2]]
        let a = SymMatrix::from_row_major(2, vec![4.0, 2.0, 2.0, 5.0]).unwrap();
        let f = cholesky_factorize(&a).unwrap();
        assert_relative_eq!(f.lower(0, 0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(f.lower(1, 0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(f.lower(1, 1), 2.0, max_relative = 1e-14);
        assert_eq!(f.lower(0, 1), 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = SymMatrix::from_row_major(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        match cholesky_factorize(&a) {
            Err(Error::NotPositiveDefinite { pivot_index }) => assert_eq!(pivot_index, 1),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn solve_identity() {
        let f = cholesky_factorize(&SymMatrix::identity(3)).unwrap();
        let x = cholesky_solve(&f, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn solve_scalar() {
        let a = SymMatrix::from_row_major(1, vec![4.0]).unwrap();
        let f = cholesky_factorize(&a).unwrap();
        let x = cholesky_solve(&f, &[8.0]).unwrap();
        assert_relative_eq!(x[0], 2.0, max_relative = 1e-14);
    }

    #[test]
    fn solve_2x2() {
        // [[4,2],[2,5]] x = (10,11): elimination gives 4y = 6, so
        // x = (1.75, 1.5)
        let a = SymMatrix::from_row_major(2, vec![4.0, 2.0, 2.0, 5.0]).unwrap();
        let f = cholesky_factorize(&a).unwrap();
        let x = cholesky_solve(&f, &[10.0, 11.0]).unwrap();
        assert_relative_eq!(x[0], 1.75, max_relative = 1e-12);
        assert_relative_eq!(x[1], 1.5, max_relative = 1e-12);
    }

    #[test]
    fn solve_dimension_mismatch() {
        let f = cholesky_factorize(&SymMatrix::identity(3)).unwrap();
        assert!(matches!(
            cholesky_solve(&f, &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn min_eigenvalue_diagonal() {
        let a = SymMatrix::from_row_major(2, vec![2.0, 0.0, 0.0, 5.0]).unwrap();
        let l = min_eigenvalue(&a, 1e-10, 10000).unwrap();
        assert_relative_eq!(l, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn min_eigenvalue_identity() {
        let l = min_eigenvalue(&SymMatrix::identity(4), 1e-10, 10000).unwrap();
        assert_relative_eq!(l, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn min_eigenvalue_2x2() {
        // eigenvalues of [[4,2],[2,5]]: roots of l^2 - 9l + 16
        let a = SymMatrix::from_row_major(2, vec![4.0, 2.0, 2.0, 5.0]).unwrap();
        let l = min_eigenvalue(&a, 1e-10, 10000).unwrap();
        let expect = (9.0 - 17.0_f64.sqrt()) / 2.0;
        assert_relative_eq!(l, expect, max_relative = 1e-8);
    }

    #[test]
    fn max_singular_single_row() {
        let n = DenseMatrix::from_row_major(1, 2, vec![3.0, 0.0]).unwrap();
        let s = max_singular_value(&n, 1e-10, 10000).unwrap();
        assert_relative_eq!(s, 3.0, max_relative = 1e-8);
    }

    #[test]
    fn max_singular_identity() {
        let n = DenseMatrix::from_row_major(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let s = max_singular_value(&n, 1e-10, 10000).unwrap();
        assert_relative_eq!(s, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn max_singular_bidiagonal() {
        // [[1,1],[0,1]]: largest singular value is the golden ratio
        let n = DenseMatrix::from_row_major(2, 2, vec![1.0, 1.0, 0.0, 1.0]).unwrap();
        let s = max_singular_value(&n, 1e-12, 100000).unwrap();
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert_relative_eq!(s, golden, max_relative = 1e-7);
    }

    #[test]
    fn max_singular_zero_matrix() {
        let n = DenseMatrix::zeros(2, 3);
        assert!(matches!(
            max_singular_value(&n, 1e-8, 100),
            Err(Error::ZeroMatrix)
        ));
    }

    #[test]
    fn matvec_cases() {
        let i2 = DenseMatrix::from_row_major(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(i2.matvec(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);

        let n = DenseMatrix::from_row_major(1, 2, vec![1.0, 2.0]).unwrap();
        assert_eq!(n.matvec(&[1.0, 1.0]).unwrap(), vec![3.0]);
        assert_eq!(n.matvec_transpose(&[2.0]).unwrap(), vec![2.0, 4.0]);
    }
}
