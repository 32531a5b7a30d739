//! Exact rational kernels: univariate polynomials, dense matrices, rational
//! root finding, and (simultaneous) diagonalization.

mod eigen;
mod matrix;
mod modular;
mod roots;
mod unipoly;

pub use eigen::{
    char_poly, commute_family, commuting_family_diagonalizable, eigen_decomposition,
    is_diagonalizable_over_closure, nullspace, simultaneous_diagonalize, squarefree_part,
    EigenDecomposition, SIMULTANEOUS_RETRIES,
};
pub(crate) use matrix::primitive_integer_vector;
pub use matrix::RatMatrix;
pub use roots::{rational_root_split, rational_roots_with_multiplicity, RootSplit};
pub use unipoly::UniPoly;
