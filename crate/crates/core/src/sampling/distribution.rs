use super::rng::Rng64;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Finite distribution sampled by inverse CDF (binary search over the
/// cumulative table). Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution<T> {
    probabilities: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Scalar> DiscreteDistribution<T> {
    /// Builds from non-negative weights; zero weights are never drawn.
    pub fn from_weights(weights: &[T]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite() || *w < T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "weight {index} is negative or non-finite"
            )));
        }
        let total: T = weights.iter().copied().sum();
        if total <= T::zero() {
            return Err(Error::ZeroMatrix);
        }
        let probabilities = weights.iter().map(|&w| w / total).collect();
        let mut running = T::zero();
        let cumulative = weights
            .iter()
            .map(|&w| {
                running += w;
                // dividing the running sum (not summing quotients) pins the
                // last entry to exactly one
                running / total
            })
            .collect();
        Ok(Self {
            probabilities,
            cumulative,
        })
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }

    /// Index of the first cumulative entry strictly above `u`.
    #[inline]
    pub fn index_for(&self, u: T) -> usize {
        let k = self.cumulative.partition_point(|&c| c <= u);
        k.min(self.cumulative.len() - 1)
    }

    #[inline]
    pub fn sample(&self, rng: &mut Rng64) -> usize {
        self.index_for(T::of(rng.next_f64()))
    }
}

/// `p_ij = a_ij² / ‖A‖_F²` over row-major (i, j) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexPairDistribution<T> {
    rows: usize,
    cols: usize,
    inner: DiscreteDistribution<T>,
}

impl<T: Scalar> IndexPairDistribution<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn probability(&self, i: usize, j: usize) -> T {
        self.inner.probabilities()[i * self.cols + j]
    }

    pub fn probabilities(&self) -> &[T] {
        self.inner.probabilities()
    }

    pub fn cumulative(&self) -> &[T] {
        self.inner.cumulative()
    }

    #[inline]
    pub fn sample_pair(&self, rng: &mut Rng64) -> (usize, usize) {
        let k = self.inner.sample(rng);
        (k / self.cols, k % self.cols)
    }
}

/// Squared-norm weights scaled by the largest magnitude, so tiny entries do
/// not underflow to a zero probability.
fn squared_weights<T: Scalar>(values: impl Iterator<Item = T>, scale: T) -> Vec<T> {
    values
        .map(|v| {
            let s = v / scale;
            s * s
        })
        .collect()
}

pub fn build_pair_distribution<T: Scalar>(a: &DenseMatrix<T>) -> Result<IndexPairDistribution<T>> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let scale = a.max_abs();
    let weights = squared_weights(a.as_slice().iter().copied(), scale);
    Ok(IndexPairDistribution {
        rows: a.rows(),
        cols: a.cols(),
        inner: DiscreteDistribution::from_weights(&weights)?,
    })
}

/// Rows drawn with probability `‖A_i:‖² / ‖A‖_F²`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowDistribution<T>(pub DiscreteDistribution<T>);

/// Columns drawn with probability `‖A_:j‖² / ‖A‖_F²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDistribution<T>(pub DiscreteDistribution<T>);

pub fn build_row_distribution<T: Scalar>(a: &DenseMatrix<T>) -> Result<RowDistribution<T>> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let scale = a.max_abs();
    let weights: Vec<T> = (0..a.rows())
        .map(|i| squared_weights(a.row(i).iter().copied(), scale).into_iter().sum())
        .collect();
    Ok(RowDistribution(DiscreteDistribution::from_weights(&weights)?))
}

pub fn build_column_distribution<T: Scalar>(a: &DenseMatrix<T>) -> Result<ColumnDistribution<T>> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let scale = a.max_abs();
    let weights: Vec<T> = (0..a.cols())
        .map(|j| squared_weights(a.column(j).into_iter(), scale).into_iter().sum())
        .collect();
    Ok(ColumnDistribution(DiscreteDistribution::from_weights(&weights)?))
}

/// Uniform pair over `m × n`.
#[inline]
pub fn sample_uniform_pair(m: usize, n: usize, rng: &mut Rng64) -> (usize, usize) {
    let k = rng.index(m * n);
    (k / n, k % n)
}
