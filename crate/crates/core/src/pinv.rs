//! Moore–Penrose pseudoinverse by truncated SVD, with independent checks of
//! the Penrose conditions and of the standard dagger identities.

use serde::{Deserialize, Serialize};

use crate::error::{shape_mismatch, Result};
use crate::numlin::{
    min_eigenvalue, null_basis, op_norm, projector, range_basis, residual_scale, subspace_equal,
    svd, DenseMatrix, SvdFactors, TolerancePolicy,
};

/// `A† = V Σ⁺ U*`, inverting only singular values above the rank threshold.
pub fn pinv(a: &DenseMatrix, tol: &TolerancePolicy) -> Result<DenseMatrix> {
    Ok(pinv_from_svd(&svd(a)?, tol))
}

pub fn pinv_from_svd(s: &SvdFactors, tol: &TolerancePolicy) -> DenseMatrix {
    let (m, n) = (s.rows(), s.cols());
    let r = s.rank(tol);
    let v_scaled = DenseMatrix::from_fn(n, r, |i, k| s.v.get(i, k) / s.sigma[k]);
    if r == 0 {
        return DenseMatrix::zeros(n, m);
    }
    &v_scaled * &s.u.leading_columns(r).adjoint()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenroseReport {
    /// `||A† A A† − A†||`
    pub residual_a_dag_a_a_dag: f64,
    /// `||A A† A − A||`
    pub residual_a_a_dag_a: f64,
    /// `||A† A − (A† A)*||`
    pub residual_sym_a_dag_a: f64,
    /// `||A A† − (A A†)*||`
    pub residual_sym_a_a_dag: f64,
    /// `||A A† − P_R(A)||`
    pub residual_proj_range: f64,
    /// `||A† A − P_R(A†)||`
    pub residual_proj_carrier: f64,
    /// Each residual is at most `subspace_tol * max(1, ||A||)`.
    pub pass: bool,
}

impl PenroseReport {
    pub fn residuals(&self) -> [(&'static str, f64); 6] {
        [
            ("a_dag_a_a_dag", self.residual_a_dag_a_a_dag),
            ("a_a_dag_a", self.residual_a_a_dag_a),
            ("sym_a_dag_a", self.residual_sym_a_dag_a),
            ("sym_a_a_dag", self.residual_sym_a_a_dag),
            ("proj_range", self.residual_proj_range),
            ("proj_carrier", self.residual_proj_carrier),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals()
            .iter()
            .fold(0.0_f64, |acc, &(_, r)| acc.max(r))
    }
}

/// Checks a candidate `a_dag` against both Penrose condition sets.
pub fn penrose_verify(
    a: &DenseMatrix,
    a_dag: &DenseMatrix,
    tol: &TolerancePolicy,
) -> Result<PenroseReport> {
    if a_dag.shape() != (a.cols(), a.rows()) {
        return Err(shape_mismatch(
            "candidate pseudoinverse must be the transpose shape",
            a.shape(),
            a_dag.shape(),
        ));
    }
    let a_dag_a = a_dag * a;
    let a_a_dag = a * a_dag;
    let p_range = projector(&range_basis(a, tol)?);
    let p_carrier = projector(&range_basis(a_dag, tol)?);

    let mut report = PenroseReport {
        residual_a_dag_a_a_dag: op_norm(&(&a_dag_a * a_dag - a_dag)),
        residual_a_a_dag_a: op_norm(&(&a_a_dag * a - a)),
        residual_sym_a_dag_a: op_norm(&(&a_dag_a - a_dag_a.adjoint())),
        residual_sym_a_a_dag: op_norm(&(&a_a_dag - a_a_dag.adjoint())),
        residual_proj_range: op_norm(&(&a_a_dag - &p_range)),
        residual_proj_carrier: op_norm(&(&a_dag_a - &p_carrier)),
        pass: false,
    };
    report.pass = report.max_residual() <= tol.subspace_tol * residual_scale(a);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub id: String,
    pub residual: f64,
}

/// Residuals of the dagger identities: `A†† = A`, `A*† = A†*`,
/// `(A*A)† = A† A*†`, `(AA*)† = A*† A†`, `N(A*†) = N(A)`, and positivity of
/// `A*A`, `AA*`, `A† A*†`, `A*† A†` (reported as `max(0, -λ_min)`).
pub fn dagger_identities(a: &DenseMatrix, tol: &TolerancePolicy) -> Result<Vec<IdentityResidual>> {
    let a_star = a.adjoint();
    let a_dag = pinv(a, tol)?;
    let a_star_dag = pinv(&a_star, tol)?;
    let gram = &a_star * a;
    let cogram = a * &a_star;
    let dagger_gram = &a_dag * &a_star_dag;
    let dagger_cogram = &a_star_dag * &a_dag;

    let negativity = |m: &DenseMatrix| -> Result<f64> { Ok((-min_eigenvalue(m)?).max(0.0)) };
    let null_equal = subspace_equal(&null_basis(&a_star_dag, tol)?, &null_basis(a, tol)?, tol)?;

    let items = [
        ("double_dagger", op_norm(&(pinv(&a_dag, tol)? - a))),
        ("adjoint_dagger", op_norm(&(&a_star_dag - a_dag.adjoint()))),
        (
            "dagger_of_gram",
            op_norm(&(pinv(&gram, tol)? - &dagger_gram)),
        ),
        (
            "dagger_of_cogram",
            op_norm(&(pinv(&cogram, tol)? - &dagger_cogram)),
        ),
        ("null_of_adjoint_dagger", null_equal.residual),
        ("gram_positive", negativity(&gram)?),
        ("cogram_positive", negativity(&cogram)?),
        ("dagger_gram_positive", negativity(&dagger_gram)?),
        ("dagger_cogram_positive", negativity(&dagger_cogram)?),
    ];
    Ok(items
        .into_iter()
        .map(|(id, residual)| IdentityResidual {
            id: id.to_string(),
            residual,
        })
        .collect())
}
