use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::baselines::{rek_step, rgs_step, rk_step};
use super::dsgs::{dsgs_step, StepsizePolicy};
use super::sor::{sor_variant_step, SorVariant};
use super::state::{SolverState, RESIDUAL_DRIFT_TOLERANCE};
use super::unlocked::{unlocked_gs_step, UnlockedCase};
use crate::error::{Error, Result};
use crate::linalg::{norm, norm_sq, sub};
use crate::problems::LinearSystem;
use crate::sampling::{build_column_distribution, build_pair_distribution, build_row_distribution, Rng64};
use crate::scalar::Scalar;
use crate::trace::{ConvergenceTrace, InitialPoint, Termination, TerminationMetric, TracePoint};

/// Randomized solver for a consistent linear system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearSolver {
    Dsgs(StepsizePolicy),
    /// Randomized Kaczmarz.
    Rk,
    /// Randomized coordinate descent (randomized Gauss-Seidel on the normal equations).
    Rgs,
    /// Randomized extended Kaczmarz.
    Rek,
}

/// Metric values measured at an epoch boundary.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Metrics<T> {
    pub x_error: Option<T>,
    pub residual_norm: Option<T>,
    pub objective: Option<T>,
}

impl<T: Scalar> Metrics<T> {
    fn get(&self, metric: TerminationMetric) -> Option<T> {
        match metric {
            TerminationMetric::XError => self.x_error,
            TerminationMetric::Residual => self.residual_norm,
            TerminationMetric::FValue => self.objective,
        }
    }
}

/// Outcome of [`run_epochs`].
pub(crate) struct LoopOutcome<T> {
    pub points: Vec<TracePoint<T>>,
    pub converged: bool,
    pub truncated: bool,
}

/// Shared epoch loop.
///
/// `measure` is called at every epoch boundary (including before the first
/// update) and returns the metrics used for termination and recording.
/// `advance(state, target)` performs updates until the update counter
/// reaches `target` or the next step would overshoot it, and returns the
/// new counter. A call that makes no progress ends the run as truncated.
pub(crate) fn run_epochs<T: Scalar, S>(
    n: usize,
    termination: &Termination,
    state: &mut S,
    updates: impl Fn(&S) -> u64,
    mut measure: impl FnMut(&mut S) -> Result<Metrics<T>>,
    mut advance: impl FnMut(&mut S, u64) -> Result<u64>,
) -> Result<LoopOutcome<T>> {
    if !(termination.threshold > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "termination threshold must be positive, got {}",
            termination.threshold
        )));
    }
    let n = n as u64;
    let every = termination.record_every.max(1);
    let threshold = T::of(termination.threshold);
    let start = Instant::now();
    let mut points = Vec::new();
    let mut last_recorded = None;

    loop {
        let done = updates(state);
        let epoch = done.div_ceil(n);
        let metrics = measure(state)?;
        let value = metrics.get(termination.metric).ok_or_else(|| {
            Error::InvalidParameter(format!("metric {:?} is not available for this run", termination.metric))
        })?;
        let converged = value <= threshold;
        let capped = done >= termination.max_updates;
        let point = TracePoint {
            epoch,
            coordinate_updates: done,
            x_error: metrics.x_error,
            residual_norm: metrics.residual_norm,
            objective: metrics.objective,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        };
        let stop = converged || capped;
        if stop || epoch % every == 0 {
            points.push(point.clone());
            last_recorded = Some(epoch);
        }
        if stop {
            return Ok(LoopOutcome {
                points,
                converged,
                truncated: !converged,
            });
        }
        let target = (epoch + 1).saturating_mul(n).min(termination.max_updates);
        let after = advance(state, target)?;
        if after == done {
            // A single step would exceed the cap.
            if last_recorded != Some(epoch) {
                points.push(point);
            }
            return Ok(LoopOutcome {
                points,
                converged: false,
                truncated: true,
            });
        }
    }
}

/// Solves `Ax = b` with the chosen randomized method.
///
/// The trace records `‖x − x*‖` when the system carries a solution,
/// `‖Ax − b‖` and `½‖Ax − b‖²` at every recorded epoch boundary. The solver
/// draws from `rng`; Gaussian starting points draw from it first.
pub fn solve_linear<T: Scalar>(
    system: &LinearSystem<T>,
    solver: LinearSolver,
    termination: &Termination,
    init: &InitialPoint,
    rng: Rng64,
) -> Result<ConvergenceTrace<T>> {
    let a = &system.a;
    let b = &system.b;
    let n = a.cols();
    let mut state = SolverState::initial(a, b, init, rng)?;
    let mut refreshes = 0u64;
    let caches_residual = matches!(solver, LinearSolver::Dsgs(_) | LinearSolver::Rgs);

    let mut measure = |s: &mut SolverState<T>| -> Result<Metrics<T>> {
        if caches_residual {
            let (drift, fresh) = s.residual_drift(a, b);
            if drift > T::of(RESIDUAL_DRIFT_TOLERANCE) {
                refreshes += 1;
            }
            // The cache is replaced either way; metrics always come from
            // the recomputed residual.
            s.residual = fresh;
        } else {
            s.refresh_residual(a, b);
        }
        let r2 = norm_sq(&s.residual);
        Ok(Metrics {
            x_error: system.solution.as_ref().map(|xs| norm(&sub(&s.x, xs))),
            residual_norm: Some(r2.sqrt()),
            objective: Some(r2 / T::of(2.0)),
        })
    };

    let outcome = match solver {
        LinearSolver::Dsgs(policy) => {
            let alpha = policy.resolve(a)?;
            let dist = build_pair_distribution(a)?;
            run_epochs(
                n,
                termination,
                &mut state,
                |s| s.updates,
                &mut measure,
                |s, target| {
                    while s.updates < target {
                        let pair = dist.sample_pair(&mut s.rng);
                        dsgs_step(s, a, pair, alpha)?;
                    }
                    Ok(s.updates)
                },
            )?
        }
        LinearSolver::Rgs => {
            let cols = build_column_distribution(a)?;
            run_epochs(
                n,
                termination,
                &mut state,
                |s| s.updates,
                &mut measure,
                |s, target| {
                    while s.updates < target {
                        let j = cols.0.sample(&mut s.rng);
                        rgs_step(s, a, j)?;
                    }
                    Ok(s.updates)
                },
            )?
        }
        LinearSolver::Rk => {
            let rows = build_row_distribution(a)?;
            run_epochs(
                n,
                termination,
                &mut state,
                |s| s.updates,
                &mut measure,
                |s, target| {
                    while s.updates + n as u64 <= target {
                        let i = rows.0.sample(&mut s.rng);
                        rk_step(s, a, b, i)?;
                    }
                    Ok(s.updates)
                },
            )?
        }
        LinearSolver::Rek => {
            let rows = build_row_distribution(a)?;
            let cols = build_column_distribution(a)?;
            run_epochs(
                n,
                termination,
                &mut state,
                |s| s.updates,
                &mut measure,
                |s, target| {
                    while s.updates + n as u64 <= target {
                        let i = rows.0.sample(&mut s.rng);
                        let j = cols.0.sample(&mut s.rng);
                        rek_step(s, a, b, i, j)?;
                    }
                    Ok(s.updates)
                },
            )?
        }
    };

    Ok(ConvergenceTrace {
        points: outcome.points,
        converged: outcome.converged,
        truncated: outcome.truncated,
        x: state.x,
        residual_refreshes: refreshes,
    })
}

fn recompute_metrics<T: Scalar>(system: &LinearSystem<T>, s: &mut SolverState<T>) -> Metrics<T> {
    s.refresh_residual(&system.a, &system.b);
    let r2 = norm_sq(&s.residual);
    Metrics {
        x_error: system.solution.as_ref().map(|xs| norm(&sub(&s.x, xs))),
        residual_norm: Some(r2.sqrt()),
        objective: Some(r2 / T::of(2.0)),
    }
}

fn finish<T: Scalar>(outcome: LoopOutcome<T>, state: SolverState<T>) -> ConvergenceTrace<T> {
    ConvergenceTrace {
        points: outcome.points,
        converged: outcome.converged,
        truncated: outcome.truncated,
        x: state.x,
        residual_refreshes: 0,
    }
}

/// Runs a relaxed Gauss-Seidel variant on a square system.
///
/// A sweep counts as `n` coordinate updates (`2n` for the symmetric
/// variant) and a single random coordinate as one.
pub fn sor_solve<T: Scalar>(
    system: &LinearSystem<T>,
    variant: &SorVariant,
    alpha: T,
    termination: &Termination,
    init: &InitialPoint,
    rng: Rng64,
) -> Result<ConvergenceTrace<T>> {
    let (a, b) = (&system.a, &system.b);
    let n = a.cols() as u64;
    let cost = match variant {
        SorVariant::Cyclic | SorVariant::RandomPermutation => n,
        SorVariant::Symmetric => 2 * n,
        SorVariant::UniformRandom | SorVariant::NonUniformRandom(_) => 1,
    };
    let cap = termination.max_updates;
    let mut state = SolverState::initial(a, b, init, rng)?;
    let outcome = run_epochs(
        a.cols(),
        termination,
        &mut state,
        |s| s.updates,
        |s| Ok(recompute_metrics(system, s)),
        |s, target| {
            while s.updates < target && s.updates + cost <= cap {
                sor_variant_step(&mut s.x, a, b, alpha, variant, &mut s.rng)?;
                s.updates += cost;
            }
            Ok(s.updates)
        },
    )?;
    Ok(finish(outcome, state))
}

/// Runs unlocked Gauss-Seidel with every (equation, variable) pair drawn
/// uniformly. Not convergent in general; provided to show divergence.
pub fn unlocked_gs_solve<T: Scalar>(
    system: &LinearSystem<T>,
    alpha: T,
    termination: &Termination,
    init: &InitialPoint,
    rng: Rng64,
) -> Result<ConvergenceTrace<T>> {
    let (a, b) = (&system.a, &system.b);
    let mut state = SolverState::initial(a, b, init, rng)?;
    let outcome = run_epochs(
        a.cols(),
        termination,
        &mut state,
        |s| s.updates,
        |s| Ok(recompute_metrics(system, s)),
        |s, target| {
            while s.updates < target {
                unlocked_gs_step(&mut s.x, a, b, alpha, UnlockedCase::UniformRandom, &mut s.rng)?;
                s.updates += 1;
            }
            Ok(s.updates)
        },
    )?;
    Ok(finish(outcome, state))
}
