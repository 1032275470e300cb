//! Message counts of a controller/worker deployment.
//!
//! Each worker holds some columns of `A`. A DSGS update needs the sampled
//! residual entry sent to the worker owning column `j` and the column
//! update sent back: two messages per coordinate update, `2n` per epoch. A
//! Kaczmarz iteration changes every coordinate, which costs one message per
//! coordinate: `n` per iteration, and one iteration is one epoch. The tally
//! does not depend on how columns are spread over workers.

use serde::{Deserialize, Serialize};

use crate::config::SolverId;
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageTally {
    pub per_epoch: u64,
    pub epochs: u64,
    pub workers: u64,
    pub total: u64,
}

/// Messages exchanged between the controller and workers over `epochs`
/// epochs of an `m × n` system.
pub fn simulate_message_counts(solver: &str, m: usize, n: usize, epochs: u64, workers: u64) -> Result<MessageTally> {
    if workers == 0 {
        return Err(BenchError::Config("worker count must be at least 1".into()));
    }
    if m == 0 || n == 0 {
        return Err(BenchError::Config(format!("dimensions must be positive, got {m}x{n}")));
    }
    let n = n as u64;
    let per_epoch = match SolverId::parse(solver) {
        Some(SolverId::Dsgs | SolverId::Dsap | SolverId::Dsg) => 2 * n,
        Some(SolverId::Rk) => n,
        _ => return Err(BenchError::Config(format!("no message model for solver {solver:?}"))),
    };
    Ok(MessageTally {
        per_epoch,
        epochs,
        workers,
        total: per_epoch * epochs,
    })
}
