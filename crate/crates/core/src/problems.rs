//! Reproducible instance generators.
//!
//! Every generator is a pure function of its arguments and seed. Gaussian
//! entries come from [`Rng64::normal`], matrices are filled row-major, and
//! the planted solution is drawn after the matrix.

use crate::error::{Error, Result};
use crate::feasibility::FeasibilityProblem;
use crate::linalg::{svd, DenseMatrix, DEFAULT_RANK_THRESHOLD};
use crate::sampling::Rng64;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equality,
    Inequality,
}

/// `A x = b` (or `A x <= b`) with an optional known solution.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<T> {
    pub a: DenseMatrix<T>,
    pub b: Vec<T>,
    pub solution: Option<Vec<T>>,
    pub relation: Relation,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn new(a: DenseMatrix<T>, b: Vec<T>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "b has {} entries for a matrix with {} rows",
                b.len(),
                a.rows()
            )));
        }
        Ok(Self {
            a,
            b,
            solution: None,
            relation: Relation::Equality,
        })
    }

    pub fn with_solution(mut self, x: Vec<T>) -> Result<Self> {
        if x.len() != self.a.cols() {
            return Err(Error::Dimension("solution length differs from column count".into()));
        }
        self.solution = Some(x);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }
}

fn gaussian_matrix<T: Scalar>(m: usize, n: usize, rng: &mut Rng64) -> DenseMatrix<T> {
    let data = (0..m * n).map(|_| T::of(rng.normal())).collect();
    DenseMatrix::new(m, n, data).expect("Gaussian draws are finite")
}

fn gaussian_vector<T: Scalar>(n: usize, rng: &mut Rng64) -> Vec<T> {
    (0..n).map(|_| T::of(rng.normal())).collect()
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "dimensions must be positive, got {m}x{n}"
        )));
    }
    Ok(())
}

fn planted<T: Scalar>(a: DenseMatrix<T>, rng: &mut Rng64) -> LinearSystem<T> {
    let x: Vec<T> = gaussian_vector(a.cols(), rng);
    let b = a.mul_vec(&x);
    LinearSystem {
        a,
        b,
        solution: Some(x),
        relation: Relation::Equality,
    }
}

/// Standard Gaussian `A` and `x*`, with `b = A x*`.
pub fn gen_gaussian_consistent<T: Scalar>(m: usize, n: usize, seed: u64) -> Result<LinearSystem<T>> {
    check_dims(m, n)?;
    let mut rng = Rng64::new(seed);
    let a = gaussian_matrix(m, n, &mut rng);
    Ok(planted(a, &mut rng))
}

/// Scale factor `c` mapping `σ_i ↦ σ_min + c (σ_i − σ_min)` so that
/// `σ_max / σ_min` becomes `k_target`.
pub fn condition_scale(sigma_max: f64, sigma_min: f64, k_target: f64) -> Result<f64> {
    if !(k_target >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target condition number {k_target} < 1"
        )));
    }
    if !(sigma_max > sigma_min) {
        return Err(Error::InvalidParameter(
            "all singular values are equal; the spectrum cannot be stretched".into(),
        ));
    }
    Ok((k_target - 1.0) * sigma_min / (sigma_max - sigma_min))
}

/// Reshapes the nonzero singular values of `a` so that `k(a) = k_target`.
pub fn shape_condition<T: Scalar>(a: &DenseMatrix<T>, k_target: f64) -> Result<DenseMatrix<T>> {
    let s = svd(a, T::of(DEFAULT_RANK_THRESHOLD))?;
    let low = s.smallest_nonzero().ok_or(Error::ZeroMatrix)?;
    let c = T::of(condition_scale(s.largest().as_f64(), low.as_f64(), k_target)?);
    let mut shaped = s.clone();
    for sig in shaped.sigma.iter_mut().take(s.rank) {
        *sig = low + c * (*sig - low);
    }
    Ok(shaped.reconstruct())
}

/// Gaussian matrix with its singular spectrum stretched to `k(A) = k_target`,
/// and a planted Gaussian solution.
pub fn gen_conditioned<T: Scalar>(m: usize, n: usize, k_target: f64, seed: u64) -> Result<LinearSystem<T>> {
    check_dims(m, n)?;
    if m.min(n) < 2 {
        return Err(Error::InvalidParameter("conditioning needs min(m, n) >= 2".into()));
    }
    let mut rng = Rng64::new(seed);
    let raw: DenseMatrix<T> = gaussian_matrix(m, n, &mut rng);
    let a = shape_condition(&raw, k_target)?;
    Ok(planted(a, &mut rng))
}

/// `A = Σ_{k<r} u_k v_kᵀ` with Gaussian factors, planted solution.
pub fn gen_rank_deficient<T: Scalar>(m: usize, n: usize, rank: usize, seed: u64) -> Result<LinearSystem<T>> {
    check_dims(m, n)?;
    if rank == 0 || rank >= m.min(n) {
        return Err(Error::InvalidParameter(format!(
            "rank must satisfy 1 <= r < min(m, n), got r={rank} for {m}x{n}"
        )));
    }
    let mut rng = Rng64::new(seed);
    let a = low_rank(m, n, rank, &mut rng);
    Ok(planted(a, &mut rng))
}

fn low_rank<T: Scalar>(m: usize, n: usize, rank: usize, rng: &mut Rng64) -> DenseMatrix<T> {
    let u: DenseMatrix<T> = gaussian_matrix(m, rank, rng);
    let v: DenseMatrix<T> = gaussian_matrix(rank, n, rng);
    u.matmul(&v).expect("factor shapes agree")
}

/// Default slack scale for feasibility instances.
pub const DEFAULT_SLACK: f64 = 1.0;

fn slacked<T: Scalar>(a: DenseMatrix<T>, slack: f64, rng: &mut Rng64) -> FeasibilityProblem<T> {
    let x0: Vec<T> = gaussian_vector(a.cols(), rng);
    let mut b = a.mul_vec(&x0);
    for bi in b.iter_mut() {
        // uniform on (0, slack]
        *bi += T::of(slack * (1.0 - rng.next_f64()));
    }
    FeasibilityProblem {
        a,
        b,
        witness: Some(x0),
    }
}

fn check_slack(slack: f64) -> Result<()> {
    if !(slack > 0.0) || !slack.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "slack scale must be positive, got {slack}"
        )));
    }
    Ok(())
}

/// Gaussian `A`, Gaussian witness `x₀`, and `b = A x₀ + s` with slack
/// entries uniform on `(0, slack]`, so `x₀` is strictly feasible.
pub fn gen_feasible_inequalities<T: Scalar>(
    m: usize,
    n: usize,
    seed: u64,
    slack: f64,
) -> Result<FeasibilityProblem<T>> {
    check_dims(m, n)?;
    check_slack(slack)?;
    let mut rng = Rng64::new(seed);
    let a = gaussian_matrix(m, n, &mut rng);
    Ok(slacked(a, slack, &mut rng))
}

/// As [`gen_feasible_inequalities`] with a rank-`rank` coefficient matrix.
pub fn gen_rank_deficient_feasible<T: Scalar>(
    m: usize,
    n: usize,
    rank: usize,
    seed: u64,
    slack: f64,
) -> Result<FeasibilityProblem<T>> {
    check_dims(m, n)?;
    check_slack(slack)?;
    if rank == 0 || rank >= m.min(n) {
        return Err(Error::InvalidParameter(format!(
            "rank must satisfy 1 <= r < min(m, n), got r={rank} for {m}x{n}"
        )));
    }
    let mut rng = Rng64::new(seed);
    let a = low_rank(m, n, rank, &mut rng);
    Ok(slacked(a, slack, &mut rng))
}

/// `A = [[1, −τ], [−τ, 1]]`, `b = 0`; the unique solution is the origin.
pub fn example1_system<T: Scalar>(tau: T) -> LinearSystem<T> {
    let a = DenseMatrix::from_rows(&[[T::one(), -tau], [-tau, T::one()]]).expect("finite tau gives a finite matrix");
    LinearSystem {
        a,
        b: vec![T::zero(); 2],
        solution: Some(vec![T::zero(); 2]),
        relation: Relation::Equality,
    }
}

/// Iteration matrices of the four unlocked pair updates on
/// [`example1_system`], in case order (1,1), (1,2), (2,1), (2,2).
///
/// Each matrix is exactly the linear map `x ↦ x⁺` of the corresponding
/// update, e.g. case 1 is `x₁ ← (1−α)x₁ + ατx₂`.
pub fn example2_case_matrices<T: Scalar>(tau: T, alpha: T) -> [DenseMatrix<T>; 4] {
    let one = T::one();
    let zero = T::zero();
    let mk = |r: [[T; 2]; 2]| DenseMatrix::from_rows(&r).expect("finite entries");
    [
        mk([[one - alpha, alpha * tau], [zero, one]]),
        mk([[one, zero], [alpha / tau, one - alpha]]),
        mk([[one - alpha, alpha / tau], [zero, one]]),
        mk([[one, zero], [alpha * tau, one - alpha]]),
    ]
}

/// The four matrices `B₁…B₄` with the published entries.
///
/// These equal [`example2_case_matrices`] except for `B₁`'s (1,1) entry,
/// which is `1 − ατ` here and `1 − α` in the case-1 update.
pub fn example2_matrices<T: Scalar>(tau: T, alpha: T) -> [DenseMatrix<T>; 4] {
    let mut ms = example2_case_matrices(tau, alpha);
    ms[0].set(0, 0, T::one() - alpha * tau);
    ms
}

/// Over-parameterized least-squares data: Gaussian `A` (`m < n`), planted
/// Gaussian `x*`, `b = A x*`.
pub fn gen_overparameterized<T: Scalar>(m: usize, n: usize, seed: u64) -> Result<LinearSystem<T>> {
    if m >= n {
        return Err(Error::InvalidParameter(format!(
            "over-parameterized instances need m < n, got {m}x{n}"
        )));
    }
    gen_gaussian_consistent(m, n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm, relative_condition_number};

    #[test]
    fn gaussian_consistent_is_exact_and_deterministic() {
        let s1 = gen_gaussian_consistent::<f64>(7, 4, 11).unwrap();
        let s2 = gen_gaussian_consistent::<f64>(7, 4, 11).unwrap();
        assert_eq!(s1, s2);
        let x = s1.solution.as_ref().unwrap();
        assert_eq!(norm(&s1.a.residual(x, &s1.b)), 0.0);
        assert_ne!(s1, gen_gaussian_consistent::<f64>(7, 4, 12).unwrap());
    }

    #[test]
    fn condition_scale_closed_form() {
        assert!((condition_scale(3.0, 1.0, 10.0).unwrap() - 4.5).abs() < 1e-15);
        assert!(condition_scale(1.0, 1.0, 10.0).is_err());
        assert!(condition_scale(2.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn shaping_diagonal_matrix() {
        let a = DenseMatrix::<f64>::from_diag(&[3.0, 1.0]).unwrap();
        let shaped = shape_condition(&a, 10.0).unwrap();
        let s = svd(&shaped, 1e-10).unwrap();
        assert!((s.sigma[0] - 10.0).abs() < 1e-13);
        assert!((s.sigma[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn shaping_to_current_condition_is_identity() {
        let sys = gen_gaussian_consistent::<f64>(6, 4, 5).unwrap();
        let k = relative_condition_number(&sys.a).unwrap();
        let shaped = shape_condition(&sys.a, k).unwrap();
        assert!(shaped.sub(&sys.a).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn conditioned_instance_hits_target() {
        let sys = gen_conditioned::<f64>(40, 20, 100.0, 3).unwrap();
        let k = relative_condition_number(&sys.a).unwrap();
        assert!((k / 100.0 - 1.0).abs() < 1e-6, "k = {k}");
        let x = sys.solution.as_ref().unwrap();
        assert!(norm(&sys.a.residual(x, &sys.b)) < 1e-12);
        assert!(gen_conditioned::<f64>(5, 1, 10.0, 0).is_err());
    }

    #[test]
    fn rank_deficient_rank_one_rows_are_parallel() {
        let sys = gen_rank_deficient::<f64>(5, 4, 1, 8).unwrap();
        let r0 = sys.a.row(0).to_vec();
        for i in 1..5 {
            let ri = sys.a.row(i);
            let cos = crate::linalg::dot(&r0, ri) / (norm(&r0) * norm(ri));
            assert!((cos.abs() - 1.0).abs() < 1e-12);
        }
        assert!(gen_rank_deficient::<f64>(5, 4, 4, 8).is_err());
        assert!(gen_rank_deficient::<f64>(5, 4, 0, 8).is_err());
    }

    #[test]
    fn feasible_witness_has_positive_slack() {
        let p = gen_feasible_inequalities::<f64>(30, 10, 4, 1.0).unwrap();
        let w = p.witness.as_ref().unwrap();
        let r = p.a.residual(w, &p.b);
        assert!(r.iter().all(|&v| v < 0.0 && v >= -1.0 - 1e-12));
        assert_eq!(p, gen_feasible_inequalities::<f64>(30, 10, 4, 1.0).unwrap());
        assert!(gen_feasible_inequalities::<f64>(3, 2, 4, 0.0).is_err());
        assert!(gen_feasible_inequalities::<f64>(3, 2, 4, -1.0).is_err());
    }

    #[test]
    fn example_instances() {
        let s = example1_system(2.0f64);
        assert_eq!(s.a.as_slice(), &[1.0, -2.0, -2.0, 1.0]);
        assert_eq!(s.b, vec![0.0, 0.0]);

        let b = example2_case_matrices(2.0f64, 0.5);
        assert_eq!(b[0].as_slice(), &[0.5, 1.0, 0.0, 1.0]);
        assert_eq!(b[1].as_slice(), &[1.0, 0.0, 0.25, 0.5]);
        assert_eq!(b[2].as_slice(), &[0.5, 0.25, 0.0, 1.0]);
        assert_eq!(b[3].as_slice(), &[1.0, 0.0, 1.0, 0.5]);

        let lit = example2_matrices(2.0f64, 0.5);
        assert_eq!(lit[0].as_slice(), &[0.0, 1.0, 0.0, 1.0]);
        assert_eq!(&lit[1..], &b[1..]);
    }

    #[test]
    fn zero_stepsize_matrices_are_identity() {
        for m in example2_case_matrices(3.0f64, 0.0) {
            assert_eq!(m, DenseMatrix::identity(2));
        }
        // 1 − ατ is also 1 at α = 0
        for m in example2_matrices(3.0f64, 0.0) {
            assert_eq!(m, DenseMatrix::identity(2));
        }
    }
}
