//! One-sided (Hestenes) Jacobi SVD.

use super::matrix::{dot, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Default numerical-rank threshold, relative to the largest singular value.
pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-10;

/// Thin SVD `A = U diag(σ) Vᵀ` with `k = min(m, n)` components.
///
/// Singular values are sorted non-increasing. Columns of `U` that belong to
/// exactly-zero singular values are completed to an orthonormal set, so both
/// `U` and `V` always have orthonormal columns.
#[derive(Debug, Clone)]
pub struct SvdResult<T> {
    pub u: DenseMatrix<T>,
    pub sigma: Vec<T>,
    pub v: DenseMatrix<T>,
    /// Count of σ_i above `zero_threshold * σ₁`.
    pub rank: usize,
}

impl<T: Scalar> SvdResult<T> {
    pub fn largest(&self) -> T {
        self.sigma[0]
    }

    /// Smallest singular value counted in the numerical rank.
    pub fn smallest_nonzero(&self) -> Option<T> {
        self.rank.checked_sub(1).map(|r| self.sigma[r])
    }

    /// `U diag(σ) Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let (m, n, k) = (self.u.rows(), self.v.rows(), self.sigma.len());
        let mut data = vec![T::zero(); m * n];
        for i in 0..m {
            for j in 0..n {
                let mut s = T::zero();
                for l in 0..k {
                    s += self.u.get(i, l) * self.sigma[l] * self.v.get(j, l);
                }
                data[i * n + j] = s;
            }
        }
        DenseMatrix::new(m, n, data).expect("reconstruction of finite factors is finite")
    }

    /// Moore-Penrose pseudo-inverse applied to a vector, `A⁺ y`, using the
    /// components inside the numerical rank.
    pub fn pinv_apply(&self, y: &[T]) -> Vec<T> {
        let n = self.v.rows();
        let mut out = vec![T::zero(); n];
        for l in 0..self.rank {
            let ul: T = (0..self.u.rows()).map(|i| self.u.get(i, l) * y[i]).sum();
            let c = ul / self.sigma[l];
            for (j, o) in out.iter_mut().enumerate() {
                *o += c * self.v.get(j, l);
            }
        }
        out
    }
}

/// Computes the thin SVD of `a`.
///
/// `zero_threshold` is relative to σ₁ and only affects the reported rank.
pub fn svd<T: Scalar>(a: &DenseMatrix<T>, zero_threshold: T) -> Result<SvdResult<T>> {
    if !(zero_threshold >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "zero_threshold must be non-negative, got {zero_threshold}"
        )));
    }
    let (m, n) = a.shape();
    let (u, sigma, v) = if m >= n {
        jacobi_tall(a)?
    } else {
        let (u, s, v) = jacobi_tall(&a.transpose())?;
        (v, s, u)
    };
    let cut = zero_threshold * sigma[0];
    let rank = if sigma[0] == T::zero() {
        0
    } else {
        sigma.iter().take_while(|&&s| s > cut).count()
    };
    Ok(SvdResult { u, sigma, v, rank })
}

/// Jacobi on a matrix with `rows >= cols`. Returns (U m×n, σ, V n×n).
fn jacobi_tall<T: Scalar>(a: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, Vec<T>, DenseMatrix<T>)> {
    let (m, n) = a.shape();
    // column-major working copies
    let mut w: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        })
        .collect();
    let tol = T::epsilon();

    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + T::one().hypot(zeta));
                let c = T::one() / T::one().hypot(t);
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNotConverged {
            rows: a.rows(),
            cols: a.cols(),
            sweeps: MAX_SWEEPS,
        });
    }

    let norms: Vec<T> = w.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let mut ucols: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (l, &j) in order.iter().enumerate() {
        if sigma[l] > T::zero() {
            ucols.push(w[j].iter().map(|&x| x / sigma[l]).collect());
        } else {
            ucols.push(vec![T::zero(); m]);
            missing.push(l);
        }
    }
    complete_orthonormal(&mut ucols, &missing);

    let mut udata = vec![T::zero(); m * n];
    for (l, col) in ucols.iter().enumerate() {
        for i in 0..m {
            udata[i * n + l] = col[i];
        }
    }
    let mut vdata = vec![T::zero(); n * n];
    for (l, &j) in order.iter().enumerate() {
        for i in 0..n {
            vdata[i * n + l] = v[j][i];
        }
    }
    Ok((DenseMatrix::new(m, n, udata)?, sigma, DenseMatrix::new(n, n, vdata)?))
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Fills the columns listed in `missing` with unit vectors orthogonal to
/// every other column, by Gram-Schmidt over the standard basis.
fn complete_orthonormal<T: Scalar>(cols: &mut [Vec<T>], missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let m = cols[0].len();
    let mut candidate = 0usize;
    for &l in missing {
        loop {
            assert!(candidate < m, "ran out of basis vectors while completing U");
            let mut e = vec![T::zero(); m];
            e[candidate] = T::one();
            candidate += 1;
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for (k, c) in cols.iter().enumerate() {
                    if k == l || c.iter().all(|x| *x == T::zero()) {
                        continue;
                    }
                    let proj = dot(c, &e);
                    for (ei, &ci) in e.iter_mut().zip(c) {
                        *ei -= proj * ci;
                    }
                }
            }
            let nrm = dot(&e, &e).sqrt();
            if nrm > T::of(0.5) {
                cols[l] = e.into_iter().map(|x| x / nrm).collect();
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let a = DenseMatrix::<f64>::from_diag(&[3.0, 1.0]).unwrap();
        let s = svd(&a, 1e-10).unwrap();
        assert_eq!(s.sigma, vec![3.0, 1.0]);
        assert_eq!(s.rank, 2);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s.u.get(i, j).abs() - expect).abs() < 1e-15);
                assert!((s.v.get(i, j).abs() - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let a = DenseMatrix::<f64>::zeros(3, 2);
        let s = svd(&a, 1e-10).unwrap();
        assert_eq!(s.rank, 0);
        assert!(s.sigma.iter().all(|&x| x == 0.0));
        assert!(s.smallest_nonzero().is_none());
        // U is still orthonormal
        let utu = s.u.transpose().matmul(&s.u).unwrap();
        let eye = DenseMatrix::<f64>::identity(2);
        assert!(utu.sub(&eye).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn wide_matrix_goes_through_transpose() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]]).unwrap();
        let s = svd(&a, 1e-10).unwrap();
        assert_eq!(s.u.shape(), (2, 2));
        assert_eq!(s.v.shape(), (3, 2));
        assert_eq!(s.sigma, vec![2.0, 1.0]);
        assert!(s.reconstruct().sub(&a).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn rejects_negative_threshold() {
        let a = DenseMatrix::<f64>::identity(2);
        assert!(matches!(svd(&a, -1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn pseudo_inverse_solves_consistent_system() {
        let a = DenseMatrix::<f64>::from_rows(&[[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]]).unwrap();
        let s = svd(&a, 1e-10).unwrap();
        let y = [2.0, 3.0];
        let x = s.pinv_apply(&y);
        let r = a.residual(&x, &y);
        assert!(r.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn works_in_single_precision() {
        let a = DenseMatrix::<f32>::from_rows(&[[4.0, 0.0], [3.0, 5.0]]).unwrap();
        let s = svd(&a, 1e-6).unwrap();
        let err = s.reconstruct().sub(&a).unwrap().max_abs();
        assert!(err < 1e-5, "{err}");
        assert!((s.sigma[0] * s.sigma[1] - 20.0).abs() < 1e-4);
    }
}
