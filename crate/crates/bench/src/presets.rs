//! Ready-made configs for the paper's table rows.

use dsgs::trace::TerminationMetric;

use crate::config::{
    ExperimentConfig, OutputSpec, ProblemSpec, SolverId, StepsizeSpec, TerminationSpec, SCHEMA_VERSION,
};

/// Seeds used by every preset.
pub const PRESET_SEEDS: [u64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

/// Table threshold on `‖x − x*‖` (overdetermined) or `‖Ax − b‖`
/// (underdetermined).
pub const TABLE_THRESHOLD: f64 = 1e-10;

fn table_row(name: String, problem: ProblemSpec, solver: SolverId) -> ExperimentConfig {
    let (m, n) = problem.shape();
    let metric = if m >= n {
        TerminationMetric::XError
    } else {
        TerminationMetric::Residual
    };
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        name,
        problem,
        solver,
        stepsize: if solver == SolverId::Dsgs {
            Some(StepsizeSpec::OneOverN)
        } else {
            None
        },
        termination: TerminationSpec {
            metric,
            threshold: TABLE_THRESHOLD,
            max_updates: dsgs::trace::DEFAULT_UPDATE_CAP,
            record_every: 1000,
        },
        initial: Default::default(),
        seeds: PRESET_SEEDS.to_vec(),
        outputs: OutputSpec::default(),
    }
}

/// Unconditioned Gaussian row (overdetermined or underdetermined tables).
pub fn gaussian_row(m: usize, n: usize, solver: SolverId) -> ExperimentConfig {
    table_row(
        format!("gaussian-{m}x{n}-{}", solver.name()),
        ProblemSpec::Gaussian { m, n },
        solver,
    )
}

/// Conditioned row of the overdetermined table.
pub fn conditioned_row(m: usize, n: usize, k_target: f64, solver: SolverId) -> ExperimentConfig {
    table_row(
        format!("conditioned-{m}x{n}-k{k_target}-{}", solver.name()),
        ProblemSpec::Conditioned { m, n, k_target },
        solver,
    )
}

/// Every preset by name.
pub fn all() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    for (m, n) in [(40, 20), (40, 30), (60, 30)] {
        out.push(gaussian_row(m, n, SolverId::Dsgs));
        out.push(gaussian_row(m, n, SolverId::Rk));
    }
    for (m, n) in [(40, 60), (40, 100)] {
        out.push(gaussian_row(m, n, SolverId::Dsgs));
        out.push(gaussian_row(m, n, SolverId::Rek));
    }
    for k in [10.0, 100.0, 1000.0] {
        out.push(conditioned_row(40, 20, k, SolverId::Dsgs));
    }
    out
}

pub fn by_name(name: &str) -> Option<ExperimentConfig> {
    all().into_iter().find(|c| c.name == name)
}
