//! Condition numbers, Gram-matrix eigenvalues and spectral radius.

use super::matrix::DenseMatrix;
use super::svd::{svd, DEFAULT_RANK_THRESHOLD};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which Gram matrix an eigenvalue refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramSide {
    /// `A Aᵀ` (m×m)
    Row,
    /// `Aᵀ A` (n×n)
    Column,
}

/// `Σ a_ij²`, i.e. `‖A‖_F²`.
pub fn frobenius_norm_sq<T: Scalar>(a: &DenseMatrix<T>) -> T {
    a.frobenius_norm_sq()
}

fn smallest_nonzero_sigma<T: Scalar>(a: &DenseMatrix<T>, threshold: T) -> Result<(T, T)> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let s = svd(a, threshold)?;
    let low = s.smallest_nonzero().ok_or(Error::NoNonzeroSingularValue)?;
    Ok((s.largest(), low))
}

/// `κ(A) = ‖A‖_F ‖A⁺‖₂`, with `‖A⁺‖₂` the reciprocal of the smallest
/// singular value above the default rank threshold.
pub fn scaled_condition_number<T: Scalar>(a: &DenseMatrix<T>) -> Result<T> {
    let (_, low) = smallest_nonzero_sigma(a, T::of(DEFAULT_RANK_THRESHOLD))?;
    Ok(a.frobenius_norm() / low)
}

/// `k(A) = ‖A‖₂ ‖A⁺‖₂ = σ_max / σ_min`.
pub fn relative_condition_number<T: Scalar>(a: &DenseMatrix<T>) -> Result<T> {
    let (high, low) = smallest_nonzero_sigma(a, T::of(DEFAULT_RANK_THRESHOLD))?;
    Ok(high / low)
}

/// Smallest nonzero eigenvalue of `A Aᵀ` or `Aᵀ A`.
///
/// Both Gram matrices share their nonzero spectrum (the squared singular
/// values), so `side` only documents intent here.
pub fn min_nonzero_eig_gram<T: Scalar>(a: &DenseMatrix<T>, _side: GramSide, zero_threshold: T) -> Result<T> {
    let (_, low) = smallest_nonzero_sigma(a, zero_threshold)?;
    Ok(low * low)
}

/// Smallest eigenvalue of `A Aᵀ` or `Aᵀ A`, zero included.
///
/// This is zero whenever the chosen side's dimension exceeds the numerical
/// rank.
pub fn min_eig_gram<T: Scalar>(a: &DenseMatrix<T>, side: GramSide, zero_threshold: T) -> Result<T> {
    let s = svd(a, zero_threshold)?;
    let dim = match side {
        GramSide::Row => a.rows(),
        GramSide::Column => a.cols(),
    };
    if s.rank < dim {
        return Ok(T::zero());
    }
    let low = s.sigma[dim - 1];
    Ok(low * low)
}

/// Largest eigenvalue modulus of a square matrix.
///
/// 2×2 matrices use the closed-form eigenvalues. Larger matrices use
/// Gelfand's formula `ρ = lim ‖Mᴺ‖^{1/N}` with `N = 2^k` reached by repeated
/// squaring; the iterate is renormalized after each squaring and the scale
/// is carried in log space, which handles complex and defective spectra.
pub fn spectral_radius<T: Scalar>(m: &DenseMatrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    match m.rows() {
        1 => Ok(m.get(0, 0).abs()),
        2 => Ok(spectral_radius_2x2(m)),
        _ => Ok(T::of(gelfand_radius(m))),
    }
}

fn spectral_radius_2x2<T: Scalar>(m: &DenseMatrix<T>) -> T {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let half_trace = (a + d) / T::of(2.0);
    let det = a * d - b * c;
    let disc = half_trace * half_trace - det;
    if disc >= T::zero() {
        let r = disc.sqrt();
        (half_trace + r).abs().max((half_trace - r).abs())
    } else {
        // complex pair: |λ|² = det
        det.sqrt()
    }
}

fn gelfand_radius<T: Scalar>(m: &DenseMatrix<T>) -> f64 {
    const SQUARINGS: u32 = 48;
    let n = m.rows();
    let mut b: Vec<f64> = m.as_slice().iter().map(|v| v.as_f64()).collect();
    let s0 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if s0 == 0.0 {
        return 0.0;
    }
    b.iter_mut().for_each(|v| *v /= s0);
    // Mᴺ = exp(log_scale) · B with ‖B‖_F = 1
    let mut log_scale = s0.ln();
    let mut power = 1.0f64;
    let mut tmp = vec![0.0; n * n];
    for _ in 0..SQUARINGS {
        tmp.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            for k in 0..n {
                let bik = b[i * n + k];
                if bik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    tmp[i * n + j] += bik * b[k * n + j];
                }
            }
        }
        let s = tmp.iter().map(|v| v * v).sum::<f64>().sqrt();
        if s == 0.0 || !s.is_finite() {
            // nilpotent, or underflow of a radius-zero matrix
            return 0.0;
        }
        std::mem::swap(&mut b, &mut tmp);
        b.iter_mut().for_each(|v| *v /= s);
        log_scale = 2.0 * log_scale + s.ln();
        power *= 2.0;
    }
    (log_scale / power).exp()
}
