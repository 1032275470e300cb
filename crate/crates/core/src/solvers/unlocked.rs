use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::sampling::Rng64;
use crate::scalar::Scalar;

/// Which (equation, variable) pair an unlocked Gauss-Seidel step uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnlockedCase {
    /// Zero-based `(equation i, variable j)`.
    Pair(usize, usize),
    /// Every pair with equal probability.
    UniformRandom,
}

impl UnlockedCase {
    /// Cases 1 to 4 of the 2×2 demonstration: (1,1), (1,2), (2,1), (2,2).
    pub fn numbered(case: usize) -> Result<Self> {
        match case {
            1..=4 => Ok(UnlockedCase::Pair((case - 1) / 2, (case - 1) % 2)),
            _ => Err(Error::InvalidParameter(format!("case must be 1..=4, got {case}"))),
        }
    }
}

/// `x_j ← x_j + α (b_i − A_i: x) / a_ij` for the selected pair.
pub fn unlocked_gs_step<T: Scalar>(
    x: &mut [T],
    a: &DenseMatrix<T>,
    b: &[T],
    alpha: T,
    case: UnlockedCase,
    rng: &mut Rng64,
) -> Result<()> {
    let (i, j) = match case {
        UnlockedCase::Pair(i, j) => {
            if i >= a.rows() || j >= a.cols() {
                return Err(Error::Dimension(format!(
                    "pair ({i}, {j}) outside a {}x{} matrix",
                    a.rows(),
                    a.cols()
                )));
            }
            (i, j)
        }
        UnlockedCase::UniformRandom => (rng.index(a.rows()), rng.index(a.cols())),
    };
    let aij = a.get(i, j);
    if aij == T::zero() {
        return Err(Error::ZeroPivot { row: i, col: j });
    }
    x[j] += alpha * (b[i] - dot(a.row(i), x)) / aij;
    Ok(())
}
