use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::sampling::{DiscreteDistribution, Rng64};
use crate::scalar::Scalar;

/// Classical relaxed Gauss-Seidel orderings. Each variant pairs variable
/// `i` with equation `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SorVariant {
    /// One forward sweep `i = 1, …, n`.
    Cyclic,
    /// A forward sweep followed by a backward sweep.
    Symmetric,
    /// One coordinate drawn uniformly.
    UniformRandom,
    /// One coordinate drawn with the given probabilities (normalized on use).
    NonUniformRandom(Vec<f64>),
    /// One sweep in a freshly drawn random order.
    RandomPermutation,
}

impl SorVariant {
    /// Non-uniform variant with uniform probabilities.
    pub fn non_uniform_default(n: usize) -> Self {
        SorVariant::NonUniformRandom(vec![1.0 / n as f64; n])
    }

    pub fn name(&self) -> &'static str {
        match self {
            SorVariant::Cyclic => "cyclic",
            SorVariant::Symmetric => "symmetric",
            SorVariant::UniformRandom => "uniform-random",
            SorVariant::NonUniformRandom(_) => "nonuniform-random",
            SorVariant::RandomPermutation => "random-permutation",
        }
    }

    /// All five variants, with the non-uniform one at uniform probabilities.
    pub fn all(n: usize) -> [SorVariant; 5] {
        [
            SorVariant::Cyclic,
            SorVariant::Symmetric,
            SorVariant::UniformRandom,
            SorVariant::non_uniform_default(n),
            SorVariant::RandomPermutation,
        ]
    }
}

#[inline]
fn relax<T: Scalar>(x: &mut [T], a: &DenseMatrix<T>, b: &[T], alpha: T, i: usize) {
    let row = a.row(i);
    let off: T = row
        .iter()
        .zip(x.iter())
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, (&aij, &xj))| aij * xj)
        .sum();
    let best = (b[i] - off) / row[i];
    x[i] = (T::one() - alpha) * x[i] + alpha * best;
}

/// One step of the chosen variant:
/// `x_i ← (1−α) x_i + α (b_i − Σ_{j≠i} a_ij x_j) / a_ii`
/// for each visited `i`.
pub fn sor_variant_step<T: Scalar>(
    x: &mut [T],
    a: &DenseMatrix<T>,
    b: &[T],
    alpha: T,
    variant: &SorVariant,
    rng: &mut Rng64,
) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.cols();
    if x.len() != n || b.len() != n {
        return Err(Error::Dimension(format!(
            "SOR on a {n}x{n} system got x of length {} and b of length {}",
            x.len(),
            b.len()
        )));
    }
    if let Some(i) = (0..n).find(|&i| a.get(i, i) == T::zero()) {
        return Err(Error::ZeroDiagonal(i));
    }
    match variant {
        SorVariant::Cyclic => (0..n).for_each(|i| relax(x, a, b, alpha, i)),
        SorVariant::Symmetric => {
            (0..n).for_each(|i| relax(x, a, b, alpha, i));
            (0..n).rev().for_each(|i| relax(x, a, b, alpha, i));
        }
        SorVariant::UniformRandom => relax(x, a, b, alpha, rng.index(n)),
        SorVariant::NonUniformRandom(p) => {
            if p.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "{} probabilities given for {n} coordinates",
                    p.len()
                )));
            }
            let dist = DiscreteDistribution::<f64>::from_weights(p)?;
            relax(x, a, b, alpha, dist.sample(rng));
        }
        SorVariant::RandomPermutation => {
            let mut order: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut order);
            order.into_iter().for_each(|i| relax(x, a, b, alpha, i));
        }
    }
    Ok(())
}
