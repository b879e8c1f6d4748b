//! Orthonormal subspace bases and projector-based comparison.
//!
//! Subspaces are compared through their orthogonal projectors, never by
//! matching basis vectors: `p == q` iff `||P_p - P_q||_2 <= subspace_tol`
//! and `p ⊆ q` iff `||(I - P_q) P_p||_2 <= subspace_tol`.

use serde::{Deserialize, Serialize};

use super::matrix::DenseMatrix;
use super::svd::{op_norm, svd, SvdFactors};
use super::tolerance::{RankTol, TolerancePolicy};
use crate::error::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    basis: DenseMatrix,
}

/// Outcome of a tolerance-governed subspace relation test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub holds: bool,
    pub residual: f64,
}

impl SubspaceBasis {
    /// Wraps a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: DenseMatrix) -> Result<Self> {
        let k = basis.cols();
        let defect = op_norm(&(&basis.adjoint() * &basis - DenseMatrix::identity(k)));
        if defect > ORTHONORMAL_TOL {
            return Err(Error::DimensionMismatch(format!(
                "basis columns are not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Orthonormal basis for the span of arbitrary columns.
    pub fn span_of(columns: &DenseMatrix, tol: &TolerancePolicy) -> Result<Self> {
        range_basis(columns, tol)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: DenseMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }

    pub fn projector(&self) -> DenseMatrix {
        projector(self)
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self) -> Self {
        let n = self.ambient_dim();
        if self.dim() == 0 {
            return Self {
                basis: DenseMatrix::identity(n),
            };
        }
        // Q* has k unit singular values, so the rank decision is unambiguous
        let tol = TolerancePolicy {
            rank_tol: RankTol::Absolute(0.5),
            ..TolerancePolicy::default()
        };
        null_basis(&self.basis.adjoint(), &tol).expect("orthonormal basis has finite entries")
    }
}

/// Leading `r` left singular vectors, `r` the numerical rank.
pub fn range_basis(a: &DenseMatrix, tol: &TolerancePolicy) -> Result<SubspaceBasis> {
    Ok(range_basis_from(&svd(a)?, tol))
}

/// Trailing `cols - r` right singular vectors.
pub fn null_basis(a: &DenseMatrix, tol: &TolerancePolicy) -> Result<SubspaceBasis> {
    Ok(null_basis_from(&svd(a)?, tol))
}

pub fn range_basis_from(s: &SvdFactors, tol: &TolerancePolicy) -> SubspaceBasis {
    SubspaceBasis {
        basis: s.u.leading_columns(s.rank(tol)),
    }
}

pub fn null_basis_from(s: &SvdFactors, tol: &TolerancePolicy) -> SubspaceBasis {
    SubspaceBasis {
        basis: s.v.trailing_columns(s.rank(tol)),
    }
}

/// Closure of the carrier, `N(A)^⊥`: leading `r` right singular vectors.
pub fn coimage_basis_from(s: &SvdFactors, tol: &TolerancePolicy) -> SubspaceBasis {
    SubspaceBasis {
        basis: s.v.leading_columns(s.rank(tol)),
    }
}

/// `P = Q Q*`.
pub fn projector(s: &SubspaceBasis) -> DenseMatrix {
    s.basis() * &s.basis().adjoint()
}

fn same_ambient(p: &SubspaceBasis, q: &SubspaceBasis) -> Result<()> {
    if p.ambient_dim() != q.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces live in dimensions {} and {}",
            p.ambient_dim(),
            q.ambient_dim()
        )));
    }
    Ok(())
}

pub fn subspace_equal(
    p: &SubspaceBasis,
    q: &SubspaceBasis,
    tol: &TolerancePolicy,
) -> Result<Relation> {
    same_ambient(p, q)?;
    let residual = op_norm(&(projector(p) - projector(q)));
    Ok(Relation {
        holds: residual <= tol.subspace_tol,
        residual,
    })
}

pub fn subspace_included(
    p: &SubspaceBasis,
    q: &SubspaceBasis,
    tol: &TolerancePolicy,
) -> Result<Relation> {
    same_ambient(p, q)?;
    // (I - Q Q*) P_p reduces to (I - Q Q*) basis_p, same 2-norm
    let residual = if p.dim() == 0 {
        0.0
    } else {
        let leak = p.basis() - &(q.basis() * &(&q.basis().adjoint() * p.basis()));
        op_norm(&leak)
    };
    Ok(Relation {
        holds: residual <= tol.subspace_tol,
        residual,
    })
}
