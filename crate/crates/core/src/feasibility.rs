//! Doubly stochastic alternating projection for feasible systems `Ax <= b`.
//!
//! The potential is `f(x) = ½‖(Ax − b)₊‖²`. A step draws a pair `(i, j)`
//! with probability `a_ij² / ‖A‖_F²` and, only if row `i` is violated,
//! moves `x_j` towards the row's boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, min_eig_gram, norm_sq, svd, DenseMatrix, GramSide, DEFAULT_RANK_THRESHOLD};
use crate::sampling::{build_pair_distribution, Rng64};
use crate::scalar::Scalar;
use crate::solvers::driver::{run_epochs, Metrics};
use crate::solvers::{SolverState, RESIDUAL_DRIFT_TOLERANCE};
use crate::trace::{ConvergenceTrace, InitialPoint, Termination, TerminationMetric, TracePoint};

/// Default threshold on `f(x)`.
pub const DEFAULT_F_THRESHOLD: f64 = 1e-20;

/// Sweep cap of [`project_onto_polyhedron`].
pub const PROJECTION_MAX_SWEEPS: usize = 1_000_000;

/// `Ax <= b`, optionally with a known feasible point.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityProblem<T> {
    pub a: DenseMatrix<T>,
    pub b: Vec<T>,
    pub witness: Option<Vec<T>>,
}

impl<T: Scalar> FeasibilityProblem<T> {
    pub fn new(a: DenseMatrix<T>, b: Vec<T>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "b has length {} but A has {} rows",
                b.len(),
                a.rows()
            )));
        }
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(Self { a, b, witness: None })
    }

    /// Attaches a feasible point; rejects one that violates any row.
    pub fn with_witness(mut self, x: Vec<T>) -> Result<Self> {
        let view = violation_view(&self.a, &self.b, &x)?;
        if !view.violated.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "witness violates {} row(s)",
                view.violated.len()
            )));
        }
        self.witness = Some(x);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }
}

/// Which rows are violated at a point, and by how much.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationView<T> {
    /// Rows with `A_i: x − b_i > 0`, increasing.
    pub violated: Vec<usize>,
    /// `A x − b` for every row.
    pub residuals: Vec<T>,
    /// `½ Σ_{i violated} (A_i: x − b_i)²`.
    pub objective: T,
}

/// Rows at exact equality count as satisfied.
pub fn violation_view<T: Scalar>(a: &DenseMatrix<T>, b: &[T], x: &[T]) -> Result<ViolationView<T>> {
    if x.len() != a.cols() || b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "{}x{} system got x of length {} and b of length {}",
            a.rows(),
            a.cols(),
            x.len(),
            b.len()
        )));
    }
    let residuals = a.residual(x, b);
    let violated: Vec<usize> = (0..residuals.len()).filter(|&i| residuals[i] > T::zero()).collect();
    let objective = positive_part_objective(&residuals);
    Ok(ViolationView {
        violated,
        residuals,
        objective,
    })
}

fn positive_part_objective<T: Scalar>(residuals: &[T]) -> T {
    residuals.iter().filter(|r| **r > T::zero()).map(|&r| r * r).sum::<T>() / T::of(2.0)
}

/// One step on pair `(i, j)`: a no-op when `A_i: x <= b_i`, otherwise
/// `x_j ← x_j + α (b_i − A_i: x) / a_ij`. Returns whether `x` moved.
///
/// Uses and maintains the state's cached residual. No-ops leave the update
/// counter unchanged.
pub fn dsap_step<T: Scalar>(
    state: &mut SolverState<T>,
    a: &DenseMatrix<T>,
    (i, j): (usize, usize),
    alpha: T,
) -> Result<bool> {
    if state.residual[i] <= T::zero() {
        return Ok(false);
    }
    crate::solvers::dsgs_step(state, a, (i, j), alpha)?;
    Ok(true)
}

/// Stepsize regime of [`dsap_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DsapStepsize {
    /// `α = fraction · λ_min(A Aᵀ) / ‖A‖_F²` with `0 < fraction < 1`;
    /// requires full row rank.
    FullRowRank {
        fraction: f64,
    },
    /// `α = 1/n`; any feasible system.
    General,
    Fixed(f64),
}

impl Default for DsapStepsize {
    fn default() -> Self {
        DsapStepsize::General
    }
}

impl DsapStepsize {
    pub fn resolve<T: Scalar>(&self, a: &DenseMatrix<T>) -> Result<T> {
        match *self {
            DsapStepsize::FullRowRank { fraction } => {
                if !(fraction > 0.0 && fraction < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "stepsize fraction must lie in (0, 1), got {fraction}"
                    )));
                }
                let lambda = min_eig_gram(a, GramSide::Row, T::of(DEFAULT_RANK_THRESHOLD))?;
                if lambda == T::zero() {
                    let rank = svd(a, T::of(DEFAULT_RANK_THRESHOLD))?.rank;
                    return Err(Error::NotFullRowRank { rank, rows: a.rows() });
                }
                Ok(T::of(fraction) * lambda / a.frobenius_norm_sq())
            }
            DsapStepsize::General => Ok(T::one() / T::of_usize(a.cols())),
            DsapStepsize::Fixed(alpha) => {
                if !(alpha > 0.0) || !alpha.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "stepsize must be positive, got {alpha}"
                    )));
                }
                Ok(T::of(alpha))
            }
        }
    }
}

/// Runs the alternating projection method.
///
/// Trace points carry `f(x)` as the objective and `‖(Ax − b)₊‖` as the
/// residual norm. Every sampled pair counts as one coordinate update,
/// whether or not its row was violated.
pub fn dsap_solve<T: Scalar>(
    problem: &FeasibilityProblem<T>,
    stepsize: DsapStepsize,
    termination: &Termination,
    init: &InitialPoint,
    rng: Rng64,
) -> Result<ConvergenceTrace<T>> {
    dsap_solve_observed(problem, stepsize, termination, init, rng, |_, _| {})
}

/// [`dsap_solve`] that also hands the iterate to `observer` at every epoch
/// boundary, for measurements the trace does not carry.
pub fn dsap_solve_observed<T: Scalar>(
    problem: &FeasibilityProblem<T>,
    stepsize: DsapStepsize,
    termination: &Termination,
    init: &InitialPoint,
    rng: Rng64,
    mut observer: impl FnMut(&TracePoint<T>, &[T]),
) -> Result<ConvergenceTrace<T>> {
    if termination.metric == TerminationMetric::XError {
        return Err(Error::InvalidParameter(
            "feasibility runs have no unique solution; use the f-value or residual metric".into(),
        ));
    }
    let a = &problem.a;
    let b = &problem.b;
    let alpha = stepsize.resolve(a)?;
    let dist = build_pair_distribution(a)?;
    let mut state = SolverState::initial(a, b, init, rng)?;
    let mut refreshes = 0u64;
    let mut epoch = 0u64;
    let n = a.cols() as u64;

    let outcome = run_epochs(
        a.cols(),
        termination,
        &mut state,
        |s| s.updates,
        |s: &mut SolverState<T>| {
            let (drift, fresh) = s.residual_drift(a, b);
            if drift > T::of(RESIDUAL_DRIFT_TOLERANCE) {
                refreshes += 1;
            }
            s.residual = fresh;
            let f = positive_part_objective(&s.residual);
            let metrics = Metrics {
                x_error: None,
                residual_norm: Some((f * T::of(2.0)).sqrt()),
                objective: Some(f),
            };
            epoch = s.updates.div_ceil(n);
            let point = TracePoint {
                epoch,
                coordinate_updates: s.updates,
                x_error: None,
                residual_norm: metrics.residual_norm,
                objective: metrics.objective,
                elapsed_seconds: 0.0,
            };
            observer(&point, &s.x);
            Ok(metrics)
        },
        |s, target| {
            while s.updates < target {
                let pair = dist.sample_pair(&mut s.rng);
                if !dsap_step(s, a, pair, alpha)? {
                    s.updates += 1;
                }
            }
            Ok(s.updates)
        },
    )?;

    Ok(ConvergenceTrace {
        points: outcome.points,
        converged: outcome.converged,
        truncated: outcome.truncated,
        x: state.x,
        residual_refreshes: refreshes,
    })
}

/// Euclidean projection of `x` onto `{y : Ay <= b}`.
///
/// Hildreth's method, which is Dykstra's alternating projection specialized
/// to half-spaces: `y = x − Aᵀλ` with one multiplier `λ_i >= 0` per row,
/// updated row by row. Stops after the first sweep in which no row moves
/// `y` by more than `tolerance` and no row is violated by more than
/// `tolerance`.
pub fn project_onto_polyhedron<T: Scalar>(a: &DenseMatrix<T>, b: &[T], x: &[T], tolerance: T) -> Result<Vec<T>> {
    if x.len() != a.cols() || b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "{}x{} system got x of length {} and b of length {}",
            a.rows(),
            a.cols(),
            x.len(),
            b.len()
        )));
    }
    if !(tolerance > T::zero()) {
        return Err(Error::InvalidParameter("projection tolerance must be positive".into()));
    }
    let m = a.rows();
    let row_norms: Vec<T> = (0..m).map(|i| norm_sq(a.row(i))).collect();
    let mut lambda = vec![T::zero(); m];
    let mut y = x.to_vec();
    let mut change = T::zero();
    for _ in 0..PROJECTION_MAX_SWEEPS {
        change = T::zero();
        let mut violation = T::zero();
        for i in 0..m {
            if row_norms[i] == T::zero() {
                continue;
            }
            let row = a.row(i);
            let r = dot(row, &y) - b[i];
            violation = violation.max(r);
            let delta = (r / row_norms[i]).max(-lambda[i]);
            if delta != T::zero() {
                lambda[i] += delta;
                for (yk, &ak) in y.iter_mut().zip(row) {
                    *yk -= delta * ak;
                }
                change = change.max(delta.abs() * row_norms[i].sqrt());
            }
        }
        if change <= tolerance && violation <= tolerance {
            return Ok(y);
        }
    }
    Err(Error::ProjectionNotConverged {
        iterations: PROJECTION_MAX_SWEEPS,
        change: change.as_f64(),
    })
}

/// `dist(x, S)²` through [`project_onto_polyhedron`].
pub fn distance_sq_to_polyhedron<T: Scalar>(a: &DenseMatrix<T>, b: &[T], x: &[T], tolerance: T) -> Result<T> {
    let y = project_onto_polyhedron(a, b, x, tolerance)?;
    Ok(x.iter().zip(&y).map(|(&p, &q)| (p - q) * (p - q)).sum())
}
