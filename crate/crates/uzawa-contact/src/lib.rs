//! Dual solvers for frictionless contact problems reduced to convex QPs.
//!
//! The problem
//!
//!   minimize   1/2 u^T K u - p^T u
//!   subject to h - N u >= 0
//!
//! is solved on its Lagrangian dual with the classic Uzawa method
//! (projected dual gradient ascent) or an accelerated variant with
//! optional adaptive restart, factorizing `K` exactly once. A plane-
//! stress Q4 benchmark generator, KKT diagnostics and an exhaustive
//! active-set oracle round out the toolkit.

pub mod diagnostics;
pub mod error;
pub mod fem;
pub mod instance;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod solver;

pub use error::{Error, Result};
pub use problem::ContactQp;
pub use solver::{Method, SolveResult, SolveStatus, SolverConfig, StepSize};
