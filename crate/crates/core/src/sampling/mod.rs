//! Seeded random sources and the discrete distributions the solvers draw
//! (row, column) indices from.

mod distribution;
mod rng;

pub use distribution::{
    build_column_distribution, build_pair_distribution, build_row_distribution, sample_uniform_pair,
    ColumnDistribution, DiscreteDistribution, IndexPairDistribution, RowDistribution,
};
pub use rng::{Rng64, PRNG_NAME};
