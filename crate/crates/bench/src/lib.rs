//! Experiment harness for the `dsgs` solvers.
//!
//! An [`ExperimentConfig`] names a problem family, a solver, a stepsize
//! rule, a termination rule and a list of seeds. [`run_experiment`] solves
//! one generated instance per seed and aggregates epochs and wall-clock
//! time into an [`ExperimentReport`]. Traces go to CSV and reports to JSON.

pub mod config;
pub mod demo;
pub mod error;
pub mod messages;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{ExperimentConfig, ProblemSpec, SolverId, StepsizeSpec, TerminationSpec};
pub use demo::{demo_divergence, DemoKind, DemoOutput};
pub use error::{BenchError, Result};
pub use messages::{simulate_message_counts, MessageTally};
pub use output::{emit_report_json, emit_trace_csv, read_trace_csv};
pub use run::{run_experiment, run_experiment_with_traces, ExperimentReport};
