use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix data has {len} entries, expected {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is empty")]
    Empty,

    #[error("matrix is zero")]
    ZeroMatrix,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("Jacobi SVD did not converge within {sweeps} sweeps on a {rows}x{cols} matrix")]
    SvdNotConverged { rows: usize, cols: usize, sweeps: usize },

    #[error("no singular value above the rank threshold")]
    NoNonzeroSingularValue,

    #[error("coefficient a[{row}][{col}] is zero; the pair cannot be updated")]
    ZeroPivot { row: usize, col: usize },

    #[error("row {0} is zero")]
    ZeroRow(usize),

    #[error("column {0} is zero")]
    ZeroColumn(usize),

    #[error("diagonal entry {0} is zero")]
    ZeroDiagonal(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix does not have full row rank (rank {rank}, rows {rows})")]
    NotFullRowRank { rank: usize, rows: usize },

    #[error("projection did not converge within {iterations} sweeps (last change {change:e})")]
    ProjectionNotConverged { iterations: usize, change: f64 },
}
