use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SymMatrix};

/// The discretized frictionless contact problem
///
///   minimize   1/2 u^T K u - p^T u
///   subject to h - N u >= 0
///
/// with `K` positive definite (d x d), load `p` (d), constraint matrix
/// `N` (m x d) and gap offsets `h` (m).
#[derive(Debug, Clone)]
pub struct ContactQp {
    stiffness: SymMatrix,
    load: Vec<f64>,
    constraint_matrix: DenseMatrix,
    gap_offset: Vec<f64>,
}

impl ContactQp {
    pub fn new(
        stiffness: SymMatrix,
        load: Vec<f64>,
        constraint_matrix: DenseMatrix,
        gap_offset: Vec<f64>,
    ) -> Result<Self> {
        let d = stiffness.dim();
        if load.len() != d {
            return Err(Error::DimensionMismatch {
                context: "ContactQp load",
                expected: d,
                found: load.len(),
            });
        }
        if constraint_matrix.cols() != d {
            return Err(Error::DimensionMismatch {
                context: "ContactQp constraint matrix cols",
                expected: d,
                found: constraint_matrix.cols(),
            });
        }
        if gap_offset.len() != constraint_matrix.rows() {
            return Err(Error::DimensionMismatch {
                context: "ContactQp gap offset",
                expected: constraint_matrix.rows(),
                found: gap_offset.len(),
            });
        }
        Ok(ContactQp {
            stiffness,
            load,
            constraint_matrix,
            gap_offset,
        })
    }

    /// Number of displacement degrees of freedom.
    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    /// Number of contact candidate constraints.
    pub fn ncon(&self) -> usize {
        self.constraint_matrix.rows()
    }

    pub fn stiffness(&self) -> &SymMatrix {
        &self.stiffness
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    pub fn constraint_matrix(&self) -> &DenseMatrix {
        &self.constraint_matrix
    }

    pub fn gap_offset(&self) -> &[f64] {
        &self.gap_offset
    }

    /// Gap values `g(u) = h - N u`.
    pub fn gap(&self, u: &[f64]) -> Result<Vec<f64>> {
        let nu = self.constraint_matrix.matvec(u)?;
        Ok(self
            .gap_offset
            .iter()
            .zip(&nu)
            .map(|(h, nu)| h - nu)
            .collect())
    }
}
