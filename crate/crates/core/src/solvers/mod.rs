//! Solvers for consistent linear systems.
//!
//! [`dsgs_solve`] is the doubly stochastic Gauss-Seidel method: each step
//! draws a pair `(i, j)` with probability `a_ij² / ‖A‖_F²` and moves `x_j`
//! along equation `i`. Randomized Kaczmarz, randomized coordinate descent
//! and randomized extended Kaczmarz are provided as baselines, together
//! with the classical SOR sweeps and the uniformly unlocked Gauss-Seidel
//! update used to show divergence on indefinite systems.
//!
//! Every driver counts coordinate updates; `n` updates form one epoch, and
//! a Kaczmarz projection counts as `n` updates.

mod baselines;
pub(crate) mod driver;
mod dsgs;
mod sor;
mod state;
mod unlocked;

pub mod divergence;

pub use baselines::{rek_step, rgs_step, rk_step};
pub use driver::{solve_linear, sor_solve, unlocked_gs_solve, LinearSolver};
pub use dsgs::{dsgs_step, StepsizePolicy};
pub use sor::{sor_variant_step, SorVariant};
pub use state::{SolverState, RESIDUAL_DRIFT_TOLERANCE};
pub use unlocked::{unlocked_gs_step, UnlockedCase};

use crate::error::Result;
use crate::problems::LinearSystem;
use crate::sampling::Rng64;
use crate::scalar::Scalar;
use crate::trace::{ConvergenceTrace, InitialPoint, Termination};

/// Runs the doubly stochastic Gauss-Seidel method.
pub fn dsgs_solve<T: Scalar>(
    system: &LinearSystem<T>,
    policy: StepsizePolicy,
    termination: &Termination,
    init: &InitialPoint,
    rng: Rng64,
) -> Result<ConvergenceTrace<T>> {
    solve_linear(system, LinearSolver::Dsgs(policy), termination, init, rng)
}

/// Runs randomized Kaczmarz (rows drawn by squared norm).
pub fn rk_solve<T: Scalar>(
    system: &LinearSystem<T>,
    termination: &Termination,
    init: &InitialPoint,
    rng: Rng64,
) -> Result<ConvergenceTrace<T>> {
    solve_linear(system, LinearSolver::Rk, termination, init, rng)
}

/// Runs randomized coordinate descent on `½‖Ax − b‖²` (columns drawn by
/// squared norm).
pub fn rgs_solve<T: Scalar>(
    system: &LinearSystem<T>,
    termination: &Termination,
    init: &InitialPoint,
    rng: Rng64,
) -> Result<ConvergenceTrace<T>> {
    solve_linear(system, LinearSolver::Rgs, termination, init, rng)
}

/// Runs randomized extended Kaczmarz.
pub fn rek_solve<T: Scalar>(
    system: &LinearSystem<T>,
    termination: &Termination,
    init: &InitialPoint,
    rng: Rng64,
) -> Result<ConvergenceTrace<T>> {
    solve_linear(system, LinearSolver::Rek, termination, init, rng)
}
