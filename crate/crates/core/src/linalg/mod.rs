//! Small dense linear algebra for desk-scale problems.

mod matrix;
mod spectral;
mod svd;

pub use matrix::{axpy, dot, norm, norm_sq, sub, DenseMatrix};
pub use spectral::{
    frobenius_norm_sq, min_eig_gram, min_nonzero_eig_gram, relative_condition_number, scaled_condition_number,
    spectral_radius, GramSide,
};
pub use svd::{svd, SvdResult, DEFAULT_RANK_THRESHOLD, MAX_SWEEPS};
