//! Doubly stochastic Gauss-Seidel methods.
//!
//! The crate solves three problem classes with coordinate updates that pick
//! an (equation, variable) pair at random on every step:
//!
//! * consistent linear systems `Ax = b` ([`solvers::dsgs_solve`]), with the
//!   Kaczmarz, coordinate-descent and extended-Kaczmarz baselines and the
//!   classical SOR variants that fail on indefinite systems;
//! * feasible linear inequality systems `Ax <= b` ([`feasibility::dsap_solve`]);
//! * finite sums with zero optimal value ([`overparam::dsg_solve`]).
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! experiment harness uses.

pub mod error;
pub mod feasibility;
pub mod linalg;
pub mod overparam;
pub mod problems;
pub mod sampling;
pub mod scalar;
pub mod solvers;
pub mod stats;
pub mod trace;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Dense row-major matrix of `f64`.
pub type Matrix = linalg::DenseMatrix<f64>;
/// Thin singular value decomposition of a [`Matrix`].
pub type Svd = linalg::SvdResult<f64>;
/// Linear system over `f64`.
pub type System = problems::LinearSystem<f64>;
/// Linear inequality system over `f64`.
pub type Feasibility = feasibility::FeasibilityProblem<f64>;
/// Solver state over `f64`.
pub type State = solvers::SolverState<f64>;
/// Convergence trace over `f64`.
pub type Trace = trace::ConvergenceTrace<f64>;
/// Entry-weighted pair distribution over `f64`.
pub type PairDistribution = sampling::IndexPairDistribution<f64>;
