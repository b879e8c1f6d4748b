//! Range inclusion, factorization and majorization for pairs of operators,
//! plus the finite-dimensional closed-range panel.
//!
//! For `A` and `B` with the same codomain the three statements
//!
//! * `AA* ≤ BB*` gives a contraction `C` with `A = BC`,
//! * `A = BC` for some `C` gives `R(A) ⊆ R(B)`,
//! * `R(A) ⊆ R(B)` gives some `C` with `A = BC` and a `k` such that
//!   `||Cx||² ≤ k (||x||² + ||Ax||²)`,
//!
//! are all witnessed here by the minimal-norm factor `C = B† A`.

use serde::{Deserialize, Serialize};

use crate::classify::gamma_from_svd;
use crate::error::{shape_mismatch, Error, Result};
use crate::numlin::matrix::vec_norm;
use crate::numlin::{
    coimage_basis_from, min_eigenvalue, op_norm, projector, range_basis, range_basis_from,
    residual_scale, subspace_equal, svd, DenseMatrix, Relation, TolerancePolicy,
};
use crate::pinv::pinv;
use crate::random;

pub const BOUND_K_SAMPLES: usize = 1000;
pub const PANEL_SAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DouglasReport {
    pub range_included: Relation,
    pub factor_c: DenseMatrix,
    /// `||BC − A||`
    pub residual_bc_a: f64,
    /// Largest `||Cx||² / (||x||² + ||Ax||²)` over random unit `x`. A sampled
    /// witness, not the optimal constant.
    pub bound_k: f64,
    pub bound_k_samples: usize,
    /// `||C|| ≤ 1 + tol`; only evaluated on the majorization path.
    pub contraction_ok: Option<bool>,
    pub contraction_norm: Option<f64>,
    /// `λ_min(BB* − AA*)` when majorization was examined.
    pub majorization_gap: Option<f64>,
}

fn same_codomain(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.rows() != b.rows() {
        return Err(shape_mismatch(
            "A and B need equal row counts",
            a.shape(),
            b.shape(),
        ));
    }
    Ok(())
}

/// `R(A) ⊆ R(B)` iff `||(I − P_R(B)) A|| ≤ subspace_tol · max(1, ||A||)`.
pub fn range_inclusion_check(
    a: &DenseMatrix,
    b: &DenseMatrix,
    tol: &TolerancePolicy,
) -> Result<Relation> {
    same_codomain(a, b)?;
    let q = range_basis(b, tol)?;
    let q = q.basis();
    let leak = a - &(q * &(&q.adjoint() * a));
    let residual = op_norm(&leak);
    Ok(Relation {
        holds: residual <= tol.subspace_tol * residual_scale(a),
        residual,
    })
}

fn sampled_bound_k(a: &DenseMatrix, c: &DenseMatrix, seed: u64) -> f64 {
    let mut rng = random::rng(seed);
    (0..BOUND_K_SAMPLES)
        .map(|_| {
            let x = random::unit_vector(&mut rng, a.cols());
            let cx = vec_norm(&c.apply(&x));
            let ax = vec_norm(&a.apply(&x));
            cx * cx / (1.0 + ax * ax)
        })
        .fold(0.0, f64::max)
}

fn factor_report(
    a: &DenseMatrix,
    b: &DenseMatrix,
    range_included: Relation,
    tol: &TolerancePolicy,
    seed: u64,
) -> Result<DouglasReport> {
    let c = &pinv(b, tol)? * a;
    let residual_bc_a = op_norm(&(b * &c - a));
    let bound_k = if a.cols() == 0 {
        0.0
    } else {
        sampled_bound_k(a, &c, seed)
    };
    Ok(DouglasReport {
        range_included,
        factor_c: c,
        residual_bc_a,
        bound_k,
        bound_k_samples: BOUND_K_SAMPLES,
        contraction_ok: None,
        contraction_norm: None,
        majorization_gap: None,
    })
}

/// Factors `A = BC` once `R(A) ⊆ R(B)` is confirmed.
pub fn douglas_factorize(
    a: &DenseMatrix,
    b: &DenseMatrix,
    tol: &TolerancePolicy,
    seed: u64,
) -> Result<DouglasReport> {
    let inclusion = range_inclusion_check(a, b, tol)?;
    if !inclusion.holds {
        return Err(Error::RangeNotIncluded {
            residual: inclusion.residual,
        });
    }
    factor_report(a, b, inclusion, tol, seed)
}

/// Under `AA* ≤ BB*` the factor `B† A` is a contraction.
pub fn majorization_contraction(
    a: &DenseMatrix,
    b: &DenseMatrix,
    tol: &TolerancePolicy,
    seed: u64,
) -> Result<DouglasReport> {
    let gap = majorization_gap(a, b)?;
    if gap < -tol.psd_tol {
        return Err(Error::MajorizationFails {
            min_eigenvalue: gap,
        });
    }
    let inclusion = range_inclusion_check(a, b, tol)?;
    let mut report = factor_report(a, b, inclusion, tol, seed)?;
    mark_contraction(&mut report, gap, tol);
    Ok(report)
}

/// Everything that can be said about the pair without failing: inclusion
/// residual, the candidate factor `B† A` and its residual, and the
/// contraction test when `AA* ≤ BB*` holds.
pub fn douglas_analysis(
    a: &DenseMatrix,
    b: &DenseMatrix,
    tol: &TolerancePolicy,
    seed: u64,
) -> Result<DouglasReport> {
    let gap = majorization_gap(a, b)?;
    let inclusion = range_inclusion_check(a, b, tol)?;
    let mut report = factor_report(a, b, inclusion, tol, seed)?;
    report.majorization_gap = Some(gap);
    if gap >= -tol.psd_tol {
        mark_contraction(&mut report, gap, tol);
    }
    Ok(report)
}

fn majorization_gap(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    same_codomain(a, b)?;
    min_eigenvalue(&(b * &b.adjoint() - a * &a.adjoint()))
}

fn mark_contraction(report: &mut DouglasReport, gap: f64, tol: &TolerancePolicy) {
    let norm = op_norm(&report.factor_c);
    report.majorization_gap = Some(gap);
    report.contraction_norm = Some(norm);
    report.contraction_ok = Some(norm <= 1.0 + tol.subspace_tol);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PanelItem {
    pub id: String,
    pub pass: bool,
    pub residual: Option<f64>,
    /// Holds automatically for matrices; listed for completeness.
    pub finite_dim_trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedRangePanel {
    pub rank: usize,
    pub gamma: f64,
    pub rank_threshold: f64,
    pub items: Vec<PanelItem>,
}

impl ClosedRangePanel {
    pub fn item(&self, id: &str) -> Option<&PanelItem> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }
}

/// Evaluates the closed-range characterizations that can fail for a matrix
/// and lists the ones that cannot as trivially true.
pub fn closed_range_panel(
    a: &DenseMatrix,
    tol: &TolerancePolicy,
    seed: u64,
) -> Result<ClosedRangePanel> {
    let s = svd(a)?;
    let rank = s.rank(tol);
    let threshold = s.threshold(tol);
    let g = gamma_from_svd(&s, tol);
    let scale = residual_scale(a);
    let a_star = a.adjoint();
    let cogram = a * &a_star;
    let gram = &a_star * a;
    let mut items = Vec::new();

    let trivial = |id: &str| PanelItem {
        id: id.to_string(),
        pass: true,
        residual: None,
        finite_dim_trivial: true,
    };
    let checked = |id: &str, pass: bool, residual: f64| PanelItem {
        id: id.to_string(),
        pass,
        residual: Some(residual),
        finite_dim_trivial: false,
    };

    for id in [
        "range_closed",
        "adjoint_range_closed",
        "gram_range_closed",
        "cogram_range_closed",
    ] {
        items.push(trivial(id));
    }

    let range_a = range_basis_from(&s, tol);
    let r = subspace_equal(&range_a, &range_basis(&cogram, tol)?, tol)?;
    items.push(checked(
        "range_equals_range_of_a_a_star",
        r.holds,
        r.residual,
    ));
    let r = subspace_equal(&coimage_basis_from(&s, tol), &range_basis(&gram, tol)?, tol)?;
    items.push(checked(
        "adjoint_range_equals_range_of_a_star_a",
        r.holds,
        r.residual,
    ));

    items.push(trivial("bounded_inverse_on_carrier"));
    items.push(trivial("pinv_bounded_and_total"));

    items.push(checked("gamma_positive", rank == 0 || g > threshold, g));

    // singular values that were discarded without being exactly zero
    let discarded = s.sigma[rank..].iter().copied().fold(0.0, f64::max);
    items.push(checked(
        "no_near_threshold_singular_values",
        discarded == 0.0,
        discarded,
    ));

    let mut rng = random::rng(seed);
    let p_carrier = projector(&coimage_basis_from(&s, tol));
    let lower = (0..PANEL_SAMPLES)
        .map(|_| {
            let x = p_carrier.apply(&random::unit_vector(&mut rng, a.cols()));
            g * vec_norm(&x) - vec_norm(&a.apply(&x))
        })
        .fold(0.0, f64::max);
    items.push(checked(
        "lower_bound_on_carrier",
        lower <= tol.subspace_tol * scale,
        lower,
    ));

    // ||A* x|| ≤ (1/γ) ||AA* x||, because A* x lies in the carrier of A
    let k = if g > 0.0 { 1.0 / g } else { 0.0 };
    let excess = (0..PANEL_SAMPLES)
        .map(|_| {
            let x = random::unit_vector(&mut rng, a.rows());
            vec_norm(&a_star.apply(&x)) - k * vec_norm(&cogram.apply(&x))
        })
        .fold(0.0, f64::max);
    items.push(checked(
        "adjoint_bounded_by_cogram",
        excess <= tol.subspace_tol * scale,
        excess,
    ));

    let s_factor = &pinv(&cogram, tol)? * a;
    let residual = op_norm(&(&cogram * &s_factor - a));
    items.push(checked(
        "factors_through_cogram",
        residual <= tol.subspace_tol * scale,
        residual,
    ));

    Ok(ClosedRangePanel {
        rank,
        gamma: g,
        rank_threshold: threshold,
        items,
    })
}
