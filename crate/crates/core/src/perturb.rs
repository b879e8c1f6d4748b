//! Stability of the EP property under small perturbations that live on the
//! range of `A`.
//!
//! If `A` is EP, `||B|| ||A†|| < 1`, `B A†A = B` and `AA† B = B`, then `A + B`
//! is EP with the same range and null space, and
//! `γ(A + B) ≥ γ(A) − ||B||`.

use serde::{Deserialize, Serialize};

use crate::classify::classify;
use crate::error::{shape_mismatch, Error, Result};
use crate::numlin::{
    null_basis, op_norm, range_basis, residual_scale, subspace_equal, DenseMatrix, RankTol,
    Relation, TolerancePolicy,
};
use crate::pinv::pinv;
use crate::random;

/// Additive slack, relative to `max(1, ||A||)`, on the reduced minimum
/// modulus bound.
pub const GAMMA_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    /// `||B|| ||A†||`
    pub hyp_norm_product: f64,
    /// `||B A†A − B||`
    pub hyp_b_adag_a: f64,
    /// `||AA† B − B||`
    pub hyp_a_adag_b: f64,
    pub hypotheses_pass: bool,
    pub concl_ep: bool,
    pub concl_null_equal: Relation,
    pub concl_range_equal: Relation,
    pub concl_gamma_bound: bool,
    pub gamma_a: f64,
    pub gamma_sum: f64,
    pub norm_b: f64,
    pub rank_a: usize,
    pub rank_sum: usize,
    /// Singular-value cutoff used for `A + B`, resolved against
    /// `||A|| + ||B||` rather than `||A + B||`.
    pub rank_threshold_sum: f64,
}

impl PerturbationReport {
    pub fn conclusions_pass(&self) -> bool {
        self.concl_ep
            && self.concl_null_equal.holds
            && self.concl_range_equal.holds
            && self.concl_gamma_bound
    }

    /// Hypotheses hold but some conclusion does not. Either a bug or a
    /// tolerance too tight for the conditioning of `A + B`.
    pub fn contradicts_theorem(&self) -> bool {
        self.hypotheses_pass && !self.conclusions_pass()
    }
}

pub fn check_perturbation(
    a: &DenseMatrix,
    b: &DenseMatrix,
    tol: &TolerancePolicy,
) -> Result<PerturbationReport> {
    let n = a.require_square()?;
    if a.shape() != b.shape() {
        return Err(shape_mismatch(
            "perturbation must match A",
            a.shape(),
            b.shape(),
        ));
    }
    let source = classify(a, tol)?;
    if !source.is_ep {
        return Err(Error::SourceNotEP);
    }

    let a_dag = pinv(a, tol)?;
    let norm_b = op_norm(b);
    let hyp_norm_product = norm_b * op_norm(&a_dag);
    let hyp_b_adag_a = op_norm(&(b * &a_dag * a - b));
    let hyp_a_adag_b = op_norm(&(a * &a_dag * b - b));
    let compression_tol = tol.subspace_tol * residual_scale(b);
    let hypotheses_pass = hyp_norm_product < 1.0
        && hyp_b_adag_a <= compression_tol
        && hyp_a_adag_b <= compression_tol;

    // Forming A + B leaves rounding noise of size eps (||A|| + ||B||) in every
    // direction. When B cancels most of A that noise can exceed a cutoff
    // taken relative to ||A + B|| and pose as extra rank.
    let sum = a + b;
    let rank_threshold_sum = tol.rank_tol.threshold(op_norm(a) + norm_b, n, n);
    let sum_tol = TolerancePolicy {
        rank_tol: RankTol::Absolute(rank_threshold_sum),
        ..*tol
    };
    let target = classify(&sum, &sum_tol)?;
    let concl_null_equal = subspace_equal(&null_basis(&sum, &sum_tol)?, &null_basis(a, tol)?, tol)?;
    let concl_range_equal =
        subspace_equal(&range_basis(&sum, &sum_tol)?, &range_basis(a, tol)?, tol)?;
    let gamma_a = source.gamma;
    let gamma_sum = target.gamma;
    let concl_gamma_bound = gamma_sum >= gamma_a - norm_b - GAMMA_SLACK * residual_scale(a);

    Ok(PerturbationReport {
        hyp_norm_product,
        hyp_b_adag_a,
        hyp_a_adag_b,
        hypotheses_pass,
        concl_ep: target.is_ep,
        concl_null_equal,
        concl_range_equal,
        concl_gamma_bound,
        gamma_a,
        gamma_sum,
        norm_b,
        rank_a: source.rank,
        rank_sum: target.rank,
        rank_threshold_sum,
    })
}

/// `B = P M P` with `P = AA†` and a seeded Gaussian `M`, rescaled so that
/// `||B|| ||A†|| = scale`. Both compression identities hold by construction.
pub fn generate_admissible(
    a: &DenseMatrix,
    scale: f64,
    seed: u64,
    tol: &TolerancePolicy,
) -> Result<DenseMatrix> {
    let n = a.require_square()?;
    if !(scale > 0.0 && scale < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "scale must lie in (0, 1), got {scale}"
        )));
    }
    if !classify(a, tol)?.is_ep {
        return Err(Error::SourceNotEP);
    }
    let a_dag = pinv(a, tol)?;
    let p = a * &a_dag;
    let mut rng = random::rng(seed);
    let m = random::gaussian_matrix(&mut rng, n, n);
    let raw = &p * &m * &p;
    let raw_norm = op_norm(&raw);
    let dag_norm = op_norm(&a_dag);
    if raw_norm == 0.0 || dag_norm == 0.0 {
        return Ok(DenseMatrix::zeros(n, n));
    }
    Ok(raw.scale_real(scale / (raw_norm * dag_norm)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::projector;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn diagonal_pair_satisfies_everything() {
        let a = DenseMatrix::diag_real(&[2.0, 2.0, 0.0]);
        let b = DenseMatrix::diag_real(&[0.5, 0.0, 0.0]);
        let r = check_perturbation(&a, &b, &tol()).unwrap();
        assert_eq!(r.hyp_norm_product, 0.25);
        assert_eq!(r.hyp_b_adag_a, 0.0);
        assert_eq!(r.hyp_a_adag_b, 0.0);
        assert!(r.hypotheses_pass && r.conclusions_pass());
        assert_eq!(r.gamma_sum, 2.0);
        assert_eq!(r.gamma_a, 2.0);
        assert_eq!(r.rank_sum, 2);
    }

    #[test]
    fn perturbation_into_the_null_space_fails_hypotheses() {
        let a = DenseMatrix::diag_real(&[2.0, 0.0]);
        let b = DenseMatrix::diag_real(&[0.0, 1.0]);
        let r = check_perturbation(&a, &b, &tol()).unwrap();
        assert_eq!(r.hyp_a_adag_b, 1.0);
        assert!(!r.hypotheses_pass);
        // conclusions are still evaluated: the null space moved
        assert!(!r.concl_null_equal.holds);
        assert!(!r.contradicts_theorem());
    }

    #[test]
    fn zero_perturbation_of_identity() {
        let i = DenseMatrix::identity(3);
        let r = check_perturbation(&i, &DenseMatrix::zeros(3, 3), &tol()).unwrap();
        assert!(r.hypotheses_pass && r.concl_ep && r.conclusions_pass());
    }

    #[test]
    fn errors() {
        let jordan = DenseMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let z = DenseMatrix::zeros(2, 2);
        assert_eq!(
            check_perturbation(&jordan, &z, &tol()),
            Err(Error::SourceNotEP)
        );
        assert!(matches!(
            check_perturbation(&DenseMatrix::identity(2), &DenseMatrix::zeros(3, 3), &tol()),
            Err(Error::DimensionMismatch(_))
        ));
        assert_eq!(
            generate_admissible(&jordan, 0.5, 0, &tol()),
            Err(Error::SourceNotEP)
        );
        assert!(generate_admissible(&z, 1.0, 0, &tol()).is_err());
    }

    #[test]
    fn admissible_perturbation_hits_requested_scale() {
        let mut rng = random::rng(4);
        let a = random::ep_matrix(&mut rng, 5, 3, 0.5, 2.0);
        let b = generate_admissible(&a, 0.5, 9, &tol()).unwrap();
        let r = check_perturbation(&a, &b, &tol()).unwrap();
        assert!((r.hyp_norm_product - 0.5).abs() <= 1e-12);
        assert!(r.hypotheses_pass && r.conclusions_pass());
        assert_eq!(r.rank_sum, 3);
    }

    #[test]
    fn admissible_perturbation_stays_on_the_range() {
        let a = DenseMatrix::diag_real(&[1.0, 0.0]);
        let b = generate_admissible(&a, 0.3, 17, &tol()).unwrap();
        for (i, j) in [(0, 1), (1, 0), (1, 1)] {
            assert_eq!(b.get(i, j).norm(), 0.0);
        }
        assert!((b.get(0, 0).norm() - 0.3).abs() < 1e-15);
        let p = projector(&range_basis(&a, &tol()).unwrap());
        assert_eq!(&p * &b * &p, b);
    }

    #[test]
    fn cancellation_noise_does_not_count_as_rank() {
        // rank-one A nearly cancelled by B: sigma_max(A + B) is about 0.09
        // while the rounding floor of the sum sits near eps ||A||
        let mut rng = random::rng((20_240_601 ^ 0x10) + 243);
        let _size_and_rank_draws = (
            random::uniform(&mut rng, 0.0, 1.0),
            random::uniform(&mut rng, 0.0, 1.0),
        );
        let a = random::ep_matrix(&mut rng, 4, 1, 0.5, 2.0);
        let b = generate_admissible(&a, 0.9, 20_240_601 + 215, &tol()).unwrap();
        let sigma = crate::numlin::svd(&(&a + &b)).unwrap().sigma;
        let relative_cutoff = 4.0 * f64::EPSILON * sigma[0];
        assert!(
            sigma[1] > relative_cutoff,
            "scenario lost its noise: {sigma:?}"
        );

        let r = check_perturbation(&a, &b, &tol()).unwrap();
        assert!(r.hypotheses_pass);
        assert_eq!(r.rank_sum, 1, "sigma(A + B) = {sigma:?}");
        assert!(r.conclusions_pass());
        assert!(r.gamma_sum >= r.gamma_a - r.norm_b - 1e-12);
    }

    #[test]
    fn zero_operator_gets_zero_perturbation() {
        let z = DenseMatrix::zeros(3, 3);
        assert_eq!(generate_admissible(&z, 0.5, 1, &tol()).unwrap(), z);
    }
}
