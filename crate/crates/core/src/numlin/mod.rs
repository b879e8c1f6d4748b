//! Dense complex linear algebra: matrices, SVD, numerical rank, subspace
//! bases, projectors and tolerance-governed subspace comparison.

pub mod eigen;
pub mod matrix;
pub mod subspace;
pub mod svd;
pub mod tolerance;

pub use eigen::{hermitian_eigen, min_eigenvalue, HermitianEigen};
pub use matrix::{c64, DenseJson, DenseMatrix, Scalar, I, ONE, ZERO};
pub use subspace::{
    coimage_basis_from, null_basis, null_basis_from, projector, range_basis, range_basis_from,
    subspace_equal, subspace_included, Relation, SubspaceBasis,
};
pub use svd::{numerical_rank, op_norm, svd, SvdFactors};
pub use tolerance::{RankTol, TolerancePolicy, DEFAULT_PSD_TOL, DEFAULT_SUBSPACE_TOL};

/// Conjugate transpose.
pub fn adjoint(a: &DenseMatrix) -> DenseMatrix {
    a.adjoint()
}

/// `max(1, ||A||_2)`, the scale used for relative residual tests.
pub fn residual_scale(a: &DenseMatrix) -> f64 {
    op_norm(a).max(1.0)
}
