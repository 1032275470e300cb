//! Declarative experiment descriptions.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use dsgs::trace::{InitialPoint, Termination, TerminationMetric, DEFAULT_UPDATE_CAP};

use crate::error::{BenchError, Result};

/// Version of the config and report formats.
pub const SCHEMA_VERSION: u32 = 1;

/// Instance family and shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ProblemSpec {
    /// Gaussian `A`, Gaussian `x*`, `b = Ax*`.
    Gaussian { m: usize, n: usize },
    /// Gaussian `A` reshaped to relative condition number `k_target`.
    Conditioned { m: usize, n: usize, k_target: f64 },
    /// Consistent system with a rank-`rank` coefficient matrix.
    RankDeficient { m: usize, n: usize, rank: usize },
    /// Feasible `Ax <= b` with slack scale `slack`.
    Feasible {
        m: usize,
        n: usize,
        #[serde(default = "default_slack")]
        slack: f64,
    },
    /// Feasible `Ax <= b` with a rank-`rank` coefficient matrix.
    RankDeficientFeasible {
        m: usize,
        n: usize,
        rank: usize,
        #[serde(default = "default_slack")]
        slack: f64,
    },
    /// Over-parameterized least squares (`m < n`).
    Overparameterized { m: usize, n: usize },
    /// `A = [[1, −τ], [−τ, 1]]`, `b = 0`.
    Example1 { tau: f64 },
}

fn default_slack() -> f64 {
    dsgs::problems::DEFAULT_SLACK
}

impl ProblemSpec {
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            ProblemSpec::Gaussian { m, n }
            | ProblemSpec::Conditioned { m, n, .. }
            | ProblemSpec::RankDeficient { m, n, .. }
            | ProblemSpec::Feasible { m, n, .. }
            | ProblemSpec::RankDeficientFeasible { m, n, .. }
            | ProblemSpec::Overparameterized { m, n } => (m, n),
            ProblemSpec::Example1 { .. } => (2, 2),
        }
    }

    pub fn is_inequality(&self) -> bool {
        matches!(
            self,
            ProblemSpec::Feasible { .. } | ProblemSpec::RankDeficientFeasible { .. }
        )
    }
}

/// Solver identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverId {
    Dsgs,
    Rk,
    Rgs,
    Rek,
    SorCyclic,
    SorSymmetric,
    SorUniformRandom,
    SorNonuniformRandom,
    SorRandomPermutation,
    UnlockedGs,
    Dsap,
    Dsg,
}

impl SolverId {
    pub const ALL: [SolverId; 12] = [
        SolverId::Dsgs,
        SolverId::Rk,
        SolverId::Rgs,
        SolverId::Rek,
        SolverId::SorCyclic,
        SolverId::SorSymmetric,
        SolverId::SorUniformRandom,
        SolverId::SorNonuniformRandom,
        SolverId::SorRandomPermutation,
        SolverId::UnlockedGs,
        SolverId::Dsap,
        SolverId::Dsg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverId::Dsgs => "dsgs",
            SolverId::Rk => "rk",
            SolverId::Rgs => "rgs",
            SolverId::Rek => "rek",
            SolverId::SorCyclic => "sor-cyclic",
            SolverId::SorSymmetric => "sor-symmetric",
            SolverId::SorUniformRandom => "sor-uniform-random",
            SolverId::SorNonuniformRandom => "sor-nonuniform-random",
            SolverId::SorRandomPermutation => "sor-random-permutation",
            SolverId::UnlockedGs => "unlocked-gs",
            SolverId::Dsap => "dsap",
            SolverId::Dsg => "dsg",
        }
    }

    pub fn parse(s: &str) -> Option<SolverId> {
        SolverId::ALL.into_iter().find(|id| id.name() == s)
    }

    pub fn is_sor(self) -> bool {
        matches!(
            self,
            SolverId::SorCyclic
                | SolverId::SorSymmetric
                | SolverId::SorUniformRandom
                | SolverId::SorNonuniformRandom
                | SolverId::SorRandomPermutation
        )
    }
}

/// Stepsize rule. Which rules apply depends on the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum StepsizeSpec {
    /// `α = 1/n` (DSGS on full-column-rank systems, DSAP in general).
    OneOverN,
    /// `α = λ̲_min(A Aᵀ) / ‖A‖_F²` (DSGS on rank-deficient systems).
    RankDeficient,
    /// `α = fraction · λ_min(A Aᵀ) / ‖A‖_F²` (DSAP on full-row-rank systems).
    FullRowRank {
        fraction: f64,
    },
    /// `α = γ² / (2 Σ L_i Σ L_i²)` with `γ = λ̲_min(A Aᵀ)` (DSG on least squares).
    Theorem5,
    Fixed {
        alpha: f64,
    },
}

impl StepsizeSpec {
    /// Stepsize used when a config leaves it out.
    pub fn default_for(solver: SolverId) -> Option<StepsizeSpec> {
        match solver {
            SolverId::Dsgs | SolverId::Dsap => Some(StepsizeSpec::OneOverN),
            SolverId::Dsg => Some(StepsizeSpec::Theorem5),
            SolverId::UnlockedGs => Some(StepsizeSpec::Fixed { alpha: 0.5 }),
            s if s.is_sor() => Some(StepsizeSpec::Fixed { alpha: 1.0 }),
            _ => None,
        }
    }
}

/// Termination as written in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminationSpec {
    pub metric: TerminationMetric,
    pub threshold: f64,
    #[serde(default = "default_cap")]
    pub max_updates: u64,
    /// Trace sampling interval in epochs.
    #[serde(default = "one")]
    pub record_every: u64,
}

fn default_cap() -> u64 {
    DEFAULT_UPDATE_CAP
}

fn one() -> u64 {
    1
}

impl TerminationSpec {
    pub fn to_termination(self) -> Termination {
        Termination::new(self.metric, self.threshold)
            .with_cap(self.max_updates)
            .recording_every(self.record_every)
    }
}

/// Where results go. Relative paths resolve against the CLI's `--out`
/// directory (or the working directory).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// Directory for per-seed trace CSVs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    pub problem: ProblemSpec,
    pub solver: SolverId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stepsize: Option<StepsizeSpec>,
    pub termination: TerminationSpec,
    #[serde(default)]
    pub initial: InitialPoint,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| BenchError::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            BenchError::Config(msg) => BenchError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Stepsize rule after applying the solver default.
    pub fn stepsize_rule(&self) -> Option<StepsizeSpec> {
        self.stepsize.or_else(|| StepsizeSpec::default_for(self.solver))
    }

    /// Checks everything that can be checked without solving.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        let t = &self.termination;
        if !(t.threshold > 0.0) || !t.threshold.is_finite() {
            return bad(format!("termination threshold must be positive, got {}", t.threshold));
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        let (m, n) = self.problem.shape();
        if m == 0 || n == 0 {
            return bad(format!("problem dimensions must be positive, got {m}x{n}"));
        }
        let solver = self.solver;
        if solver == SolverId::Dsap && !self.problem.is_inequality() {
            return bad("dsap requires an inequality (feasible) problem".into());
        }
        if solver != SolverId::Dsap && self.problem.is_inequality() {
            return bad(format!(
                "{} solves equations; the problem is an inequality system",
                solver.name()
            ));
        }
        if (solver.is_sor() || solver == SolverId::UnlockedGs) && m != n {
            return bad(format!("{} requires a square system, got {m}x{n}", solver.name()));
        }
        if solver == SolverId::Dsg && t.metric != TerminationMetric::FValue {
            return bad("dsg terminates on the f-value metric".into());
        }
        if solver == SolverId::Dsap && t.metric == TerminationMetric::XError {
            return bad("dsap has no unique solution; use f-value or residual".into());
        }
        match (solver, self.stepsize_rule()) {
            (SolverId::Rk | SolverId::Rgs | SolverId::Rek, Some(_)) => {
                return bad(format!("{} has no stepsize", solver.name()));
            }
            (
                SolverId::Dsgs,
                Some(StepsizeSpec::OneOverN | StepsizeSpec::RankDeficient | StepsizeSpec::Fixed { .. }),
            ) => {}
            (
                SolverId::Dsap,
                Some(StepsizeSpec::OneOverN | StepsizeSpec::FullRowRank { .. } | StepsizeSpec::Fixed { .. }),
            ) => {}
            (SolverId::Dsg, Some(StepsizeSpec::Theorem5 | StepsizeSpec::Fixed { .. })) => {}
            (s, Some(StepsizeSpec::Fixed { .. })) if s.is_sor() || s == SolverId::UnlockedGs => {}
            (_, None) => {}
            (s, Some(rule)) => return bad(format!("stepsize {rule:?} does not apply to {}", s.name())),
        }
        if let Some(StepsizeSpec::Fixed { alpha }) = self.stepsize {
            if !(alpha >= 0.0) || !alpha.is_finite() {
                return bad(format!("fixed stepsize must be finite and non-negative, got {alpha}"));
            }
        }
        Ok(())
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Canonical JSON (field order as declared, outputs excluded).
    pub fn canonical_json(&self) -> String {
        let mut echo = self.clone();
        echo.outputs = OutputSpec::default();
        serde_json::to_string(&echo).expect("config serializes")
    }

    /// SHA-256 of [`Self::canonical_json`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
