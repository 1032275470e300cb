//! Convergence traces and termination rules shared by every solver.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Error measure a run is stopped on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationMetric {
    /// `‖x − x*‖`; requires a known solution.
    XError,
    /// `‖Ax − b‖`.
    Residual,
    /// Objective value `f(x)`.
    FValue,
}

/// Default cap on coordinate updates.
pub const DEFAULT_UPDATE_CAP: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Termination {
    pub metric: TerminationMetric,
    pub threshold: f64,
    /// Hard cap on coordinate updates; hitting it truncates the run.
    pub max_updates: u64,
    /// Record one trace point every `record_every` epochs (the first and
    /// last points are always recorded).
    #[serde(default = "one")]
    pub record_every: u64,
}

fn one() -> u64 {
    1
}

impl Termination {
    pub fn new(metric: TerminationMetric, threshold: f64) -> Self {
        Self {
            metric,
            threshold,
            max_updates: DEFAULT_UPDATE_CAP,
            record_every: 1,
        }
    }

    pub fn with_cap(mut self, max_updates: u64) -> Self {
        self.max_updates = max_updates;
        self
    }

    pub fn recording_every(mut self, epochs: u64) -> Self {
        self.record_every = epochs.max(1);
        self
    }
}

/// Starting point of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InitialPoint {
    #[default]
    Zeros,
    /// Independent `N(0, scale²)` coordinates drawn from the solver stream.
    Gaussian {
        scale: f64,
    },
    Given(Vec<f64>),
}

/// One row of a trace, recorded at an epoch boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint<T> {
    pub epoch: u64,
    pub coordinate_updates: u64,
    pub x_error: Option<T>,
    pub residual_norm: Option<T>,
    pub objective: Option<T>,
    pub elapsed_seconds: f64,
}

impl<T: Scalar> TracePoint<T> {
    /// Value of the given metric, if recorded.
    pub fn metric(&self, metric: TerminationMetric) -> Option<T> {
        match metric {
            TerminationMetric::XError => self.x_error,
            TerminationMetric::Residual => self.residual_norm,
            TerminationMetric::FValue => self.objective,
        }
    }

    /// Same point with the wall-clock field cleared, for determinism checks.
    pub fn without_time(&self) -> Self {
        Self {
            elapsed_seconds: 0.0,
            ..self.clone()
        }
    }
}

/// Per-epoch record of a run. An epoch is `n` coordinate updates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace<T> {
    pub points: Vec<TracePoint<T>>,
    /// Whether the termination threshold was met.
    pub converged: bool,
    /// Whether the update cap stopped the run first.
    pub truncated: bool,
    /// Final iterate.
    pub x: Vec<T>,
    /// Number of cached-residual refreshes triggered by drift.
    pub residual_refreshes: u64,
}

impl<T: Scalar> ConvergenceTrace<T> {
    pub fn last(&self) -> Option<&TracePoint<T>> {
        self.points.last()
    }

    /// Epochs completed, fractional epochs rounded up.
    pub fn epochs(&self) -> u64 {
        self.last().map(|p| p.epoch).unwrap_or(0)
    }

    pub fn coordinate_updates(&self) -> u64 {
        self.last().map(|p| p.coordinate_updates).unwrap_or(0)
    }

    /// `(coordinate updates, metric)` pairs where the metric was recorded.
    pub fn series(&self, metric: TerminationMetric) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.metric(metric).map(|v| (p.coordinate_updates as f64, v.as_f64())))
            .collect()
    }
}
