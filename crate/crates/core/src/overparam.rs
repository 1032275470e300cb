//! Doubly stochastic gradient for non-negative finite sums
//! `f(x) = Σ_i f_i(x)` whose minimum value is zero.
//!
//! A step draws a component `i` and a coordinate `j` uniformly and moves
//! `x_j ← x_j − α ∂_j f_i(x)`.

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, min_nonzero_eig_gram, svd, DenseMatrix, GramSide, SvdResult, DEFAULT_RANK_THRESHOLD};
use crate::sampling::{sample_uniform_pair, Rng64};
use crate::scalar::Scalar;
use crate::solvers::driver::{run_epochs, Metrics};
use crate::trace::{ConvergenceTrace, InitialPoint, Termination, TerminationMetric};

/// Sum of `m` smooth non-negative components on `Rⁿ`.
pub trait FiniteSum<T: Scalar> {
    fn components(&self) -> usize;
    fn dim(&self) -> usize;
    fn component_value(&self, i: usize, x: &[T]) -> T;
    fn component_gradient(&self, i: usize, x: &[T]) -> Vec<T>;
    /// `∂_j f_i(x)`.
    fn component_partial(&self, i: usize, j: usize, x: &[T]) -> T;
    /// Lipschitz constant of `∇f_i`.
    fn lipschitz(&self, i: usize) -> T;

    fn value(&self, x: &[T]) -> T {
        (0..self.components()).map(|i| self.component_value(i, x)).sum()
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.dim()];
        for i in 0..self.components() {
            axpy(T::one(), &self.component_gradient(i, x), &mut g);
        }
        g
    }

    fn lipschitz_constants(&self) -> Vec<T> {
        (0..self.components()).map(|i| self.lipschitz(i)).collect()
    }
}

/// Components of the form `f_i(x) = φ_i(a_iᵀ x)`, so that
/// `∂_j f_i(x) = φ_i'(a_iᵀ x) a_ij`. Solvers cache the margins `a_iᵀ x`.
pub trait LinearPredictor<T: Scalar>: FiniteSum<T> {
    fn data(&self) -> &DenseMatrix<T>;
    /// `φ_i(u)`.
    fn link_value(&self, i: usize, margin: T) -> T;
    /// `φ_i'(u)`.
    fn link_derivative(&self, i: usize, margin: T) -> T;
}

macro_rules! linear_predictor_sum {
    ($ty:ident) => {
        impl<T: Scalar> FiniteSum<T> for $ty<T> {
            fn components(&self) -> usize {
                self.a.rows()
            }

            fn dim(&self) -> usize {
                self.a.cols()
            }

            fn component_value(&self, i: usize, x: &[T]) -> T {
                self.link_value(i, dot(self.a.row(i), x))
            }

            fn component_gradient(&self, i: usize, x: &[T]) -> Vec<T> {
                let d = self.link_derivative(i, dot(self.a.row(i), x));
                self.a.row(i).iter().map(|&v| d * v).collect()
            }

            fn component_partial(&self, i: usize, j: usize, x: &[T]) -> T {
                self.link_derivative(i, dot(self.a.row(i), x)) * self.a.get(i, j)
            }

            fn lipschitz(&self, i: usize) -> T {
                self.row_norms_sq[i]
            }
        }
    };
}

fn checked_rhs<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<()> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "b has length {} but A has {} rows",
            b.len(),
            a.rows()
        )));
    }
    Ok(())
}

/// `f_i(x) = ½ (a_iᵀ x − b_i)²` with `L_i = ‖a_i‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares<T> {
    pub a: DenseMatrix<T>,
    pub b: Vec<T>,
    row_norms_sq: Vec<T>,
}

impl<T: Scalar> LeastSquares<T> {
    pub fn new(a: DenseMatrix<T>, b: Vec<T>) -> Result<Self> {
        checked_rhs(&a, &b)?;
        let row_norms_sq = a.row_norms_sq();
        Ok(Self { a, b, row_norms_sq })
    }

    /// `λ̲_min(A Aᵀ)`, the quasi-strong-convexity constant of this family.
    pub fn gamma(&self) -> Result<T> {
        min_nonzero_eig_gram(&self.a, GramSide::Row, T::of(DEFAULT_RANK_THRESHOLD))
    }

    /// Projection onto the minimizer set `{x : Ax = b}` (assumed nonempty):
    /// `P(x) = x + A⁺(b − Ax)`.
    pub fn projector(&self) -> Result<LeastSquaresProjector<'_, T>> {
        Ok(LeastSquaresProjector {
            problem: self,
            svd: svd(&self.a, T::of(DEFAULT_RANK_THRESHOLD))?,
        })
    }
}

impl<T: Scalar> LinearPredictor<T> for LeastSquares<T> {
    fn data(&self) -> &DenseMatrix<T> {
        &self.a
    }

    fn link_value(&self, i: usize, margin: T) -> T {
        let r = margin - self.b[i];
        r * r / T::of(2.0)
    }

    fn link_derivative(&self, i: usize, margin: T) -> T {
        margin - self.b[i]
    }
}

linear_predictor_sum!(LeastSquares);

/// Minimum-norm correction onto the least-squares solution set.
pub struct LeastSquaresProjector<'a, T> {
    problem: &'a LeastSquares<T>,
    svd: SvdResult<T>,
}

impl<T: Scalar> LeastSquaresProjector<'_, T> {
    pub fn project(&self, x: &[T]) -> Vec<T> {
        let p = self.problem;
        let r: Vec<T> = p.b.iter().zip(p.a.mul_vec(x)).map(|(&bi, ax)| bi - ax).collect();
        let mut y = x.to_vec();
        axpy(T::one(), &self.svd.pinv_apply(&r), &mut y);
        y
    }
}

/// `f_i(x) = ½ (a_iᵀ x − b_i)₊²` with `L_i = ‖a_i‖²`: the feasibility
/// potential as a finite sum.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityObjective<T> {
    pub a: DenseMatrix<T>,
    pub b: Vec<T>,
    row_norms_sq: Vec<T>,
}

impl<T: Scalar> FeasibilityObjective<T> {
    pub fn new(a: DenseMatrix<T>, b: Vec<T>) -> Result<Self> {
        checked_rhs(&a, &b)?;
        let row_norms_sq = a.row_norms_sq();
        Ok(Self { a, b, row_norms_sq })
    }
}

impl<T: Scalar> LinearPredictor<T> for FeasibilityObjective<T> {
    fn data(&self) -> &DenseMatrix<T> {
        &self.a
    }

    fn link_value(&self, i: usize, margin: T) -> T {
        let r = (margin - self.b[i]).max(T::zero());
        r * r / T::of(2.0)
    }

    fn link_derivative(&self, i: usize, margin: T) -> T {
        (margin - self.b[i]).max(T::zero())
    }
}

linear_predictor_sum!(FeasibilityObjective);

/// `x_j ← x_j − α ∂_j f_i(x)`.
pub fn dsg_step<T: Scalar, F: FiniteSum<T> + ?Sized>(x: &mut [T], objective: &F, (i, j): (usize, usize), alpha: T) {
    let g = objective.component_partial(i, j, x);
    x[j] -= alpha * g;
}

/// `α = γ² / (2 (Σ_i L_i)(Σ_i L_i²))`, both sums over the components.
pub fn theorem5_stepsize<T: Scalar>(gamma: T, lipschitz: &[T]) -> Result<T> {
    if !(gamma > T::zero()) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    if lipschitz.is_empty() {
        return Err(Error::Empty);
    }
    if let Some(l) = lipschitz.iter().find(|l| !(**l > T::zero())) {
        return Err(Error::InvalidParameter(format!(
            "Lipschitz constants must be positive, got {l}"
        )));
    }
    let sum: T = lipschitz.iter().copied().sum();
    let sum_sq: T = lipschitz.iter().map(|&l| l * l).sum();
    Ok(gamma * gamma / (T::of(2.0) * sum * sum_sq))
}

fn start_point<T: Scalar>(dim: usize, init: &InitialPoint, rng: &mut Rng64) -> Result<Vec<T>> {
    Ok(match init {
        InitialPoint::Zeros => vec![T::zero(); dim],
        InitialPoint::Gaussian { scale } => (0..dim).map(|_| T::of(scale * rng.normal())).collect(),
        InitialPoint::Given(v) => {
            if v.len() != dim {
                return Err(Error::Dimension(format!(
                    "initial point has length {}, expected {dim}",
                    v.len()
                )));
            }
            v.iter().map(|&c| T::of(c)).collect()
        }
    })
}

fn check_run(termination: &Termination, alpha: f64) -> Result<()> {
    if termination.metric != TerminationMetric::FValue {
        return Err(Error::InvalidParameter(
            "finite-sum runs terminate on the f-value metric".into(),
        ));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "stepsize must be positive, got {alpha}"
        )));
    }
    Ok(())
}

struct DsgState<T> {
    x: Vec<T>,
    updates: u64,
    rng: Rng64,
}

/// Runs the doubly stochastic gradient method on any finite sum. Each
/// partial derivative is evaluated from scratch.
pub fn dsg_solve<T: Scalar, F: FiniteSum<T> + ?Sized>(
    objective: &F,
    alpha: T,
    termination: &Termination,
    init: &InitialPoint,
    mut rng: Rng64,
) -> Result<ConvergenceTrace<T>> {
    check_run(termination, alpha.as_f64())?;
    let (m, n) = (objective.components(), objective.dim());
    let x = start_point(n, init, &mut rng)?;
    let mut state = DsgState { x, updates: 0, rng };
    let outcome = run_epochs(
        n,
        termination,
        &mut state,
        |s| s.updates,
        |s: &mut DsgState<T>| {
            Ok(Metrics {
                objective: Some(objective.value(&s.x)),
                ..Metrics::default()
            })
        },
        |s, target| {
            while s.updates < target {
                let pair = sample_uniform_pair(m, n, &mut s.rng);
                dsg_step(&mut s.x, objective, pair, alpha);
                s.updates += 1;
            }
            Ok(s.updates)
        },
    )?;
    Ok(ConvergenceTrace {
        points: outcome.points,
        converged: outcome.converged,
        truncated: outcome.truncated,
        x: state.x,
        residual_refreshes: 0,
    })
}

struct CachedState<T> {
    x: Vec<T>,
    margins: Vec<T>,
    updates: u64,
    rng: Rng64,
}

/// [`dsg_solve`] for linear-predictor objectives: the margins `Ax` are
/// updated in `O(m)` per step and recomputed at every epoch boundary, so a
/// partial derivative costs `O(1)`. Same draws and same iterates as
/// [`dsg_solve`] up to rounding.
pub fn dsg_solve_cached<T: Scalar, F: LinearPredictor<T> + ?Sized>(
    objective: &F,
    alpha: T,
    termination: &Termination,
    init: &InitialPoint,
    mut rng: Rng64,
) -> Result<ConvergenceTrace<T>> {
    check_run(termination, alpha.as_f64())?;
    let a = objective.data();
    let (m, n) = a.shape();
    let x = start_point(n, init, &mut rng)?;
    let margins = a.mul_vec(&x);
    let mut state = CachedState {
        x,
        margins,
        updates: 0,
        rng,
    };
    let data = a.as_slice();
    // Column-major copy so the margin update walks contiguous memory.
    let columns = a.transpose();
    let columns = columns.as_slice();
    let outcome = run_epochs(
        n,
        termination,
        &mut state,
        |s| s.updates,
        |s: &mut CachedState<T>| {
            s.margins = a.mul_vec(&s.x);
            let f = s
                .margins
                .iter()
                .enumerate()
                .map(|(i, &u)| objective.link_value(i, u))
                .sum();
            Ok(Metrics {
                objective: Some(f),
                ..Metrics::default()
            })
        },
        |s, target| {
            while s.updates < target {
                let (i, j) = sample_uniform_pair(m, n, &mut s.rng);
                let g = objective.link_derivative(i, s.margins[i]) * data[i * n + j];
                let t = -alpha * g;
                if t != T::zero() {
                    s.x[j] += t;
                    for (u, &akj) in s.margins.iter_mut().zip(&columns[j * m..(j + 1) * m]) {
                        *u += t * akj;
                    }
                }
                s.updates += 1;
            }
            Ok(s.updates)
        },
    )?;
    Ok(ConvergenceTrace {
        points: outcome.points,
        converged: outcome.converged,
        truncated: outcome.truncated,
        x: state.x,
        residual_refreshes: 0,
    })
}

/// Slack allowed by [`verify_quasi_strong_convexity`].
pub const QUASI_CONVEXITY_SLACK: f64 = 1e-9;

/// Result of checking
/// `f(x) − f(P(x)) <= ⟨∇f(x), x − P(x)⟩ − (γ/2)‖P(x) − x‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiConvexityReport<T> {
    pub checked: usize,
    /// Largest `lhs − rhs` seen (negative when every point passes with room).
    pub worst_gap: T,
    /// First point whose gap exceeded the slack.
    pub witness: Option<Vec<T>>,
}

impl<T> QuasiConvexityReport<T> {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks quasi-strong convexity with constant `gamma` at every sample
/// point, using `project` as the projection onto the minimizer set.
pub fn verify_quasi_strong_convexity<T: Scalar, F: FiniteSum<T> + ?Sized>(
    objective: &F,
    gamma: T,
    project: impl Fn(&[T]) -> Vec<T>,
    points: &[Vec<T>],
) -> QuasiConvexityReport<T> {
    let mut worst = T::neg_infinity();
    let mut witness = None;
    for x in points {
        let p = project(x);
        let d: Vec<T> = x.iter().zip(&p).map(|(&a, &b)| a - b).collect();
        let lhs = objective.value(x) - objective.value(&p);
        let rhs = dot(&objective.gradient(x), &d) - gamma / T::of(2.0) * dot(&d, &d);
        let gap = lhs - rhs;
        // Relative slack keeps the check meaningful for large f.
        let slack = T::of(QUASI_CONVEXITY_SLACK) * (T::one() + lhs.abs() + rhs.abs());
        if gap > worst {
            worst = gap;
        }
        if gap > slack && witness.is_none() {
            witness = Some(x.clone());
        }
    }
    QuasiConvexityReport {
        checked: points.len(),
        worst_gap: worst,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_gradient_step() {
        let ls = LeastSquares::new(DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap(), vec![0.0]).unwrap();
        let mut x: Vec<f64> = vec![1.0, 1.0];
        dsg_step(&mut x, &ls, (0, 0), 0.1);
        assert!((x[0] - 0.8).abs() < 1e-15);
        assert_eq!(x[1], 1.0);
    }

    #[test]
    fn stepsize_formula() {
        assert_eq!(theorem5_stepsize(1.0, &[1.0]).unwrap(), 0.5);
        let base: f64 = theorem5_stepsize(2.0, &[1.0, 3.0]).unwrap();
        let scaled = theorem5_stepsize(2.0, &[5.0, 15.0]).unwrap();
        assert!((base / scaled - 125.0).abs() < 1e-9);
        assert!(theorem5_stepsize(0.0, &[1.0]).is_err());
        assert!(theorem5_stepsize(1.0, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn feasibility_components_vanish_when_satisfied() {
        let f = FeasibilityObjective::new(DenseMatrix::from_rows(&[[2.0]]).unwrap(), vec![4.0]).unwrap();
        assert_eq!(f.value(&[1.0]), 0.0);
        assert_eq!(f.value(&[3.0]), 2.0);
        assert_eq!(f.component_partial(0, 0, &[3.0]), 4.0);
        assert_eq!(f.lipschitz(0), 4.0);
    }
}
