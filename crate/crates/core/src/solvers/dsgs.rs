use serde::{Deserialize, Serialize};

use super::state::SolverState;
use crate::error::{Error, Result};
use crate::linalg::{min_nonzero_eig_gram, DenseMatrix, GramSide, DEFAULT_RANK_THRESHOLD};
use crate::scalar::Scalar;

/// How the DSGS stepsize is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepsizePolicy {
    Fixed(f64),
    /// `α = 1/n`; mean-square contraction `1 − 1/(n κ²(A))` when `A` has
    /// full column rank.
    FullColumnRank,
    /// `α = λ̲_min(A Aᵀ) / ‖A‖_F²`; residual contraction for any `A`.
    RankDeficient,
}

impl StepsizePolicy {
    pub fn resolve<T: Scalar>(&self, a: &DenseMatrix<T>) -> Result<T> {
        let alpha = match *self {
            StepsizePolicy::Fixed(alpha) => {
                if !(alpha > 0.0) || !alpha.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "stepsize must be positive, got {alpha}"
                    )));
                }
                T::of(alpha)
            }
            StepsizePolicy::FullColumnRank => T::one() / T::of_usize(a.cols()),
            StepsizePolicy::RankDeficient => {
                let lambda = min_nonzero_eig_gram(a, GramSide::Row, T::of(DEFAULT_RANK_THRESHOLD))?;
                lambda / a.frobenius_norm_sq()
            }
        };
        Ok(alpha)
    }
}

/// One DSGS update on pair `(i, j)`:
/// `x_j ← x_j − α β_i / a_ij`, then `β_k ← β_k − α (β_i / a_ij) a_kj` for all `k`.
///
/// Uses the state's cached residual `β = Ax − b` in place of a fresh
/// `A_i: x − b_i`.
#[inline]
pub fn dsgs_step<T: Scalar>(
    state: &mut SolverState<T>,
    a: &DenseMatrix<T>,
    (i, j): (usize, usize),
    alpha: T,
) -> Result<()> {
    let aij = a.get(i, j);
    if aij == T::zero() {
        return Err(Error::ZeroPivot { row: i, col: j });
    }
    let t = -alpha * state.residual[i] / aij;
    apply_column_move(state, a, j, t);
    Ok(())
}

/// `x_j += t` with the matching `β += t A_:j` update.
#[inline]
pub(crate) fn apply_column_move<T: Scalar>(state: &mut SolverState<T>, a: &DenseMatrix<T>, j: usize, t: T) {
    state.x[j] += t;
    let n = a.cols();
    let data = a.as_slice();
    for (k, r) in state.residual.iter_mut().enumerate() {
        *r += t * data[k * n + j];
    }
    state.updates += 1;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Rng64;

    fn state(a: &DenseMatrix<f64>, b: &[f64], x: Vec<f64>) -> SolverState<f64> {
        SolverState::new(a, b, x, Rng64::new(0)).unwrap()
    }

    #[test]
    fn hand_evaluated_update() {
        let a = DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]).unwrap();
        let b = [2.0, 4.0];
        let mut s = state(&a, &b, vec![0.0, 0.0]);
        dsgs_step(&mut s, &a, (0, 0), 0.5).unwrap();
        assert_eq!(s.x, vec![0.5, 0.0]);
        assert_eq!(s.residual, a.residual(&s.x, &b));
        assert_eq!(s.updates, 1);
    }

    #[test]
    fn zero_pivot_is_a_contract_violation() {
        let a = DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]).unwrap();
        let mut s = state(&a, &[1.0, 1.0], vec![0.0, 0.0]);
        assert_eq!(
            dsgs_step(&mut s, &a, (0, 1), 0.5),
            Err(Error::ZeroPivot { row: 0, col: 1 })
        );
    }

    #[test]
    fn solution_is_a_fixed_point() {
        let a = DenseMatrix::from_rows(&[[1.0, -2.0], [3.0, 0.5]]).unwrap();
        let x = vec![0.3, -1.2];
        let b = a.mul_vec(&x);
        let mut s = state(&a, &b, x.clone());
        for i in 0..2 {
            for j in 0..2 {
                for alpha in [0.1, 0.5, 1.0, 1.7] {
                    dsgs_step(&mut s, &a, (i, j), alpha).unwrap();
                    assert_eq!(s.x, x);
                }
            }
        }
    }

    #[test]
    fn stepsize_policies() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]]).unwrap();
        assert_eq!(StepsizePolicy::FullColumnRank.resolve(&a).unwrap(), 1.0 / 3.0);
        let rd: f64 = StepsizePolicy::RankDeficient.resolve(&a).unwrap();
        assert!((rd - 1.0 / 5.0).abs() < 1e-15);
        assert!(StepsizePolicy::Fixed(0.0).resolve(&a).is_err());
        assert!(StepsizePolicy::Fixed(f64::NAN).resolve(&a).is_err());
        assert_eq!(StepsizePolicy::Fixed(0.25).resolve(&a).unwrap(), 0.25);
    }
}
