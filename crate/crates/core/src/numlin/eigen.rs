use nalgebra::SymmetricEigen;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are eigenvectors, in the order of `values`.
    pub vectors: DenseMatrix,
}

/// Only the Hermitian part of `a` is used.
pub fn hermitian_eigen(a: &DenseMatrix) -> Result<HermitianEigen> {
    let n = a.require_square()?;
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: DenseMatrix::zeros(0, 0),
        });
    }
    let h = a.hermitian_part().into_inner();
    let dec = SymmetricEigen::try_new(h, f64::EPSILON, 1000 + 100 * n)
        .ok_or(Error::ConvergenceFailure("Hermitian eigensolver"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| dec.eigenvalues[i].total_cmp(&dec.eigenvalues[j]));
    let values = order.iter().map(|&k| dec.eigenvalues[k]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, k| dec.eigenvectors[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Smallest eigenvalue of the Hermitian part; `0` for the empty matrix.
pub fn min_eigenvalue(a: &DenseMatrix) -> Result<f64> {
    Ok(hermitian_eigen(a)?.values.first().copied().unwrap_or(0.0))
}
