//! Multi-seed experiment execution.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use dsgs::feasibility::{dsap_solve, DsapStepsize, FeasibilityProblem};
use dsgs::overparam::{dsg_solve_cached, theorem5_stepsize, FiniteSum, LeastSquares};
use dsgs::problems::{
    example1_system, gen_conditioned, gen_feasible_inequalities, gen_gaussian_consistent, gen_overparameterized,
    gen_rank_deficient, gen_rank_deficient_feasible, LinearSystem,
};
use dsgs::sampling::{Rng64, PRNG_NAME};
use dsgs::solvers::{solve_linear, sor_solve, unlocked_gs_solve, LinearSolver, SorVariant, StepsizePolicy};
use dsgs::stats::mean_std;
use dsgs::{Matrix, Trace};

use crate::config::{ExperimentConfig, ProblemSpec, SolverId, StepsizeSpec, SCHEMA_VERSION};
use crate::error::{BenchError, Result};

/// How the per-seed random streams are derived.
pub const SEED_SPLIT: &str =
    "problem k is generated from seed k; the solver stream is the same generator advanced by one xoshiro256** jump (2^128 draws)";

/// Generated instance.
pub enum Instance {
    Equations(LinearSystem<f64>),
    Inequalities(FeasibilityProblem<f64>),
}

impl Instance {
    pub fn matrix(&self) -> &Matrix {
        match self {
            Instance::Equations(s) => &s.a,
            Instance::Inequalities(p) => &p.a,
        }
    }
}

/// Builds the instance for one seed.
pub fn generate(spec: &ProblemSpec, seed: u64) -> Result<Instance> {
    Ok(match *spec {
        ProblemSpec::Gaussian { m, n } => Instance::Equations(gen_gaussian_consistent(m, n, seed)?),
        ProblemSpec::Conditioned { m, n, k_target } => Instance::Equations(gen_conditioned(m, n, k_target, seed)?),
        ProblemSpec::RankDeficient { m, n, rank } => Instance::Equations(gen_rank_deficient(m, n, rank, seed)?),
        ProblemSpec::Feasible { m, n, slack } => Instance::Inequalities(gen_feasible_inequalities(m, n, seed, slack)?),
        ProblemSpec::RankDeficientFeasible { m, n, rank, slack } => {
            Instance::Inequalities(gen_rank_deficient_feasible(m, n, rank, seed, slack)?)
        }
        ProblemSpec::Overparameterized { m, n } => Instance::Equations(gen_overparameterized(m, n, seed)?),
        ProblemSpec::Example1 { tau } => Instance::Equations(example1_system(tau)),
    })
}

/// Outcome of one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub epochs: u64,
    pub coordinate_updates: u64,
    pub converged: bool,
    pub truncated: bool,
    /// Termination metric at the last trace point.
    pub final_metric: Option<f64>,
    pub stepsize: Option<f64>,
    pub residual_refreshes: u64,
    pub elapsed_seconds: f64,
}

/// Aggregates over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: usize,
    pub converged: usize,
    pub truncated: usize,
    pub mean_epochs: f64,
    pub std_epochs: f64,
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

impl Summary {
    pub fn from_runs(runs: &[SeedRun]) -> Self {
        let epochs: Vec<f64> = runs.iter().map(|r| r.epochs as f64).collect();
        let secs: Vec<f64> = runs.iter().map(|r| r.elapsed_seconds).collect();
        let (mean_epochs, std_epochs) = mean_std(&epochs);
        let (mean_seconds, std_seconds) = mean_std(&secs);
        Summary {
            runs: runs.len(),
            converged: runs.iter().filter(|r| r.converged).count(),
            truncated: runs.iter().filter(|r| r.truncated).count(),
            mean_epochs,
            std_epochs,
            mean_seconds,
            std_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub software: String,
    pub prng: String,
    pub seed_split: String,
    pub seeds: Vec<u64>,
    pub config_hash: String,
    /// Stepsize rule actually applied (after solver defaults).
    pub stepsize_rule: Option<StepsizeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub metadata: Metadata,
    pub runs: Vec<SeedRun>,
    pub summary: Summary,
}

/// Solves one seed and returns the full trace with the resolved stepsize.
pub fn run_seed(config: &ExperimentConfig, seed: u64) -> Result<(Trace, Option<f64>)> {
    let instance = generate(&config.problem, seed)?;
    let termination = config.termination.to_termination();
    let init = &config.initial;
    let rng = Rng64::split(seed);
    let rule = config.stepsize_rule();
    let system = || match &instance {
        Instance::Equations(s) => Ok(s),
        Instance::Inequalities(_) => Err(BenchError::Config(format!(
            "{} needs an equation system",
            config.solver.name()
        ))),
    };
    let fixed = |rule: Option<StepsizeSpec>| match rule {
        Some(StepsizeSpec::Fixed { alpha }) => Ok(alpha),
        other => Err(BenchError::Config(format!(
            "{} needs a fixed stepsize, got {other:?}",
            config.solver.name()
        ))),
    };

    let (trace, alpha) = match config.solver {
        SolverId::Dsgs => {
            let policy = match rule {
                Some(StepsizeSpec::OneOverN) | None => StepsizePolicy::FullColumnRank,
                Some(StepsizeSpec::RankDeficient) => StepsizePolicy::RankDeficient,
                Some(StepsizeSpec::Fixed { alpha }) => StepsizePolicy::Fixed(alpha),
                Some(other) => return Err(BenchError::Config(format!("{other:?} does not apply to dsgs"))),
            };
            let s = system()?;
            let alpha = policy.resolve(&s.a)?;
            (
                solve_linear(s, LinearSolver::Dsgs(policy), &termination, init, rng)?,
                Some(alpha),
            )
        }
        SolverId::Rk => (
            solve_linear(system()?, LinearSolver::Rk, &termination, init, rng)?,
            None,
        ),
        SolverId::Rgs => (
            solve_linear(system()?, LinearSolver::Rgs, &termination, init, rng)?,
            None,
        ),
        SolverId::Rek => (
            solve_linear(system()?, LinearSolver::Rek, &termination, init, rng)?,
            None,
        ),
        s if s.is_sor() => {
            let sys = system()?;
            let variant = match s {
                SolverId::SorCyclic => SorVariant::Cyclic,
                SolverId::SorSymmetric => SorVariant::Symmetric,
                SolverId::SorUniformRandom => SorVariant::UniformRandom,
                SolverId::SorNonuniformRandom => SorVariant::non_uniform_default(sys.cols()),
                _ => SorVariant::RandomPermutation,
            };
            let alpha = fixed(rule)?;
            (sor_solve(sys, &variant, alpha, &termination, init, rng)?, Some(alpha))
        }
        SolverId::UnlockedGs => {
            let alpha = fixed(rule)?;
            (
                unlocked_gs_solve(system()?, alpha, &termination, init, rng)?,
                Some(alpha),
            )
        }
        SolverId::Dsap => {
            let Instance::Inequalities(p) = &instance else {
                return Err(BenchError::Config("dsap needs an inequality problem".into()));
            };
            let regime = match rule {
                Some(StepsizeSpec::OneOverN) | None => DsapStepsize::General,
                Some(StepsizeSpec::FullRowRank { fraction }) => DsapStepsize::FullRowRank { fraction },
                Some(StepsizeSpec::Fixed { alpha }) => DsapStepsize::Fixed(alpha),
                Some(other) => return Err(BenchError::Config(format!("{other:?} does not apply to dsap"))),
            };
            let alpha = regime.resolve(&p.a)?;
            (dsap_solve(p, regime, &termination, init, rng)?, Some(alpha))
        }
        SolverId::Dsg => {
            let s = system()?;
            let ls = LeastSquares::new(s.a.clone(), s.b.clone())?;
            let alpha = match rule {
                Some(StepsizeSpec::Theorem5) | None => theorem5_stepsize(ls.gamma()?, &ls.lipschitz_constants())?,
                Some(StepsizeSpec::Fixed { alpha }) => alpha,
                Some(other) => return Err(BenchError::Config(format!("{other:?} does not apply to dsg"))),
            };
            (dsg_solve_cached(&ls, alpha, &termination, init, rng)?, Some(alpha))
        }
        _ => unreachable!("every solver id is handled above"),
    };
    Ok((trace, alpha))
}

/// Runs every seed (in parallel) and assembles the report in seed order.
/// Traces are returned alongside so callers can write them out.
pub fn run_experiment_with_traces(config: &ExperimentConfig) -> Result<(ExperimentReport, Vec<Trace>)> {
    config.validate()?;
    let results: Vec<Result<(SeedRun, Trace)>> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let start = Instant::now();
            let (trace, stepsize) = run_seed(config, seed)?;
            let elapsed_seconds = start.elapsed().as_secs_f64();
            let run = SeedRun {
                seed,
                epochs: trace.epochs(),
                coordinate_updates: trace.coordinate_updates(),
                converged: trace.converged,
                truncated: trace.truncated,
                final_metric: trace.last().and_then(|p| p.metric(config.termination.metric)),
                stepsize,
                residual_refreshes: trace.residual_refreshes,
                elapsed_seconds,
            };
            Ok((run, trace))
        })
        .collect();
    let mut runs = Vec::with_capacity(results.len());
    let mut traces = Vec::with_capacity(results.len());
    for r in results {
        let (run, trace) = r?;
        runs.push(run);
        traces.push(trace);
    }
    let summary = Summary::from_runs(&runs);
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        metadata: Metadata {
            software: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
            prng: PRNG_NAME.to_string(),
            seed_split: SEED_SPLIT.to_string(),
            seeds: config.seeds.clone(),
            config_hash: config.hash(),
            stepsize_rule: config.stepsize_rule(),
        },
        runs,
        summary,
    };
    Ok((report, traces))
}

/// Runs every seed and returns the aggregated report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with_traces(config).map(|(report, _)| report)
}
