use super::dsgs::apply_column_move;
use super::state::SolverState;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm_sq, DenseMatrix};
use crate::scalar::Scalar;

/// Kaczmarz projection of `x` onto the hyperplane `A_i: x = b_i`.
///
/// Counts as `n` coordinate updates. The cached residual is not maintained.
pub fn rk_step<T: Scalar>(state: &mut SolverState<T>, a: &DenseMatrix<T>, b: &[T], i: usize) -> Result<()> {
    let row = a.row(i);
    let rn = norm_sq(row);
    if rn == T::zero() {
        return Err(Error::ZeroRow(i));
    }
    let t = (b[i] - dot(row, &state.x)) / rn;
    axpy(t, row, &mut state.x);
    state.updates += a.cols() as u64;
    Ok(())
}

/// Exact minimization of `½‖Ax − b‖²` over `x_j`:
/// `x_j ← x_j − A_:jᵀ β / ‖A_:j‖²`. Maintains the cached residual.
pub fn rgs_step<T: Scalar>(state: &mut SolverState<T>, a: &DenseMatrix<T>, j: usize) -> Result<()> {
    let n = a.cols();
    let data = a.as_slice();
    let mut cn = T::zero();
    let mut g = T::zero();
    for (k, &r) in state.residual.iter().enumerate() {
        let akj = data[k * n + j];
        cn += akj * akj;
        g += akj * r;
    }
    if cn == T::zero() {
        return Err(Error::ZeroColumn(j));
    }
    apply_column_move(state, a, j, -g / cn);
    Ok(())
}

/// Randomized extended Kaczmarz step on row `i` and column `j`:
/// `z ← z − (A_:jᵀ z / ‖A_:j‖²) A_:j`, then
/// `x ← x + ((b_i − z_i − A_i: x) / ‖A_i:‖²) A_i:ᵀ`.
///
/// `z` lives in `state.aux` and starts at `b`. Counts as `n` updates.
pub fn rek_step<T: Scalar>(state: &mut SolverState<T>, a: &DenseMatrix<T>, b: &[T], i: usize, j: usize) -> Result<()> {
    let n = a.cols();
    let data = a.as_slice();
    let z = state.aux.get_or_insert_with(|| b.to_vec());
    let mut cn = T::zero();
    let mut cz = T::zero();
    for (k, &zk) in z.iter().enumerate() {
        let akj = data[k * n + j];
        cn += akj * akj;
        cz += akj * zk;
    }
    if cn == T::zero() {
        return Err(Error::ZeroColumn(j));
    }
    let row = a.row(i);
    let rn = norm_sq(row);
    if rn == T::zero() {
        return Err(Error::ZeroRow(i));
    }
    let c = cz / cn;
    for (k, zk) in z.iter_mut().enumerate() {
        *zk -= c * data[k * n + j];
    }
    let t = (b[i] - z[i] - dot(row, &state.x)) / rn;
    axpy(t, row, &mut state.x);
    state.updates += n as u64;
    Ok(())
}
