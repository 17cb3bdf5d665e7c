//! Complex dense linear algebra: matrices, Hermitian eigensolves, LU solves,
//! and seeded random sampling. All higher modules build on these primitives.

mod eigen;
mod matrix;
pub mod random;
mod solve;

pub use eigen::{
    hermitian_eigen, hermitian_map, min_eigenvalue, unitary_exp, EigenDecomposition,
    HERMITICITY_INPUT_TOL,
};
pub use matrix::{
    anticommutator, commutator, kernel_outer, partial_trace, tensor_product, CMatrix,
    FlattenConvention, TraceSide,
};
pub use solve::{condition_estimate, lu_factor, Lu};
