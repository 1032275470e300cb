use crate::error::{Error, Result};
use crate::linalg::{norm, DenseMatrix};
use crate::sampling::Rng64;
use crate::scalar::Scalar;
use crate::trace::InitialPoint;

/// Relative drift allowed between the cached and recomputed residual,
/// measured as `‖β_cached − β_fresh‖ / (1 + ‖b‖)`.
pub const RESIDUAL_DRIFT_TOLERANCE: f64 = 1e-9;

/// Iterate, cached residual `β = Ax − b`, update counter and the run's RNG.
#[derive(Debug, Clone)]
pub struct SolverState<T> {
    pub x: Vec<T>,
    pub residual: Vec<T>,
    pub updates: u64,
    pub rng: Rng64,
    /// Second sequence for two-sequence methods (the REK `z`).
    pub aux: Option<Vec<T>>,
}

impl<T: Scalar> SolverState<T> {
    pub fn new(a: &DenseMatrix<T>, b: &[T], x: Vec<T>, rng: Rng64) -> Result<Self> {
        if x.len() != a.cols() || b.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "state for a {}x{} system got x of length {} and b of length {}",
                a.rows(),
                a.cols(),
                x.len(),
                b.len()
            )));
        }
        let residual = a.residual(&x, b);
        Ok(Self {
            x,
            residual,
            updates: 0,
            rng,
            aux: None,
        })
    }

    /// Builds the starting state; Gaussian starts draw from `rng`.
    pub fn initial(a: &DenseMatrix<T>, b: &[T], init: &InitialPoint, mut rng: Rng64) -> Result<Self> {
        let n = a.cols();
        let x = match init {
            InitialPoint::Zeros => vec![T::zero(); n],
            InitialPoint::Gaussian { scale } => (0..n).map(|_| T::of(scale * rng.normal())).collect(),
            InitialPoint::Given(v) => {
                if v.len() != n {
                    return Err(Error::Dimension(format!(
                        "initial point has length {}, expected {n}",
                        v.len()
                    )));
                }
                v.iter().map(|&c| T::of(c)).collect()
            }
        };
        Self::new(a, b, x, rng)
    }

    /// Recomputes `Ax − b`; returns the drift `‖β_cached − β_fresh‖ / (1 + ‖b‖)`
    /// without modifying the cache.
    pub fn residual_drift(&self, a: &DenseMatrix<T>, b: &[T]) -> (T, Vec<T>) {
        let fresh = a.residual(&self.x, b);
        let diff: T = self
            .residual
            .iter()
            .zip(&fresh)
            .map(|(&c, &f)| (c - f) * (c - f))
            .sum::<T>()
            .sqrt();
        (diff / (T::one() + norm(b)), fresh)
    }

    pub fn refresh_residual(&mut self, a: &DenseMatrix<T>, b: &[T]) {
        self.residual = a.residual(&self.x, b);
    }
}
