//! EP and hypo-EP classification.
//!
//! An operator with closed range is EP when `R(A) = R(A*)` and hypo-EP when
//! `R(A) ⊆ R(A*)`. [`classify`] evaluates every equivalent form of the EP
//! property, the hypo-EP characterizations and the chain of implications
//! that follows from hypo-EP, each as an independent residual test. None of
//! the checks short-circuits: the equivalences themselves are what a report
//! exposes, and disagreement between them points at a tolerance problem.
//!
//! In finite dimension every range is closed and EP coincides with hypo-EP.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::matrix::{inner, vec_norm};
use crate::numlin::{
    hermitian_eigen, min_eigenvalue, null_basis, null_basis_from, op_norm, projector, range_basis,
    range_basis_from, residual_scale, subspace_equal, subspace_included, svd, DenseMatrix,
    SvdFactors, TolerancePolicy, ONE, ZERO,
};
use crate::pinv::pinv_from_svd;
use crate::random;

/// Seed for the sampled norm inequality in [`classify`]; fixed so reports are
/// reproducible.
pub const CHAIN_SAMPLE_SEED: u64 = 0x00e9_1ab5;
pub const CHAIN_SAMPLES: usize = 100;
pub const WITNESS_SAMPLES: usize = 100;

/// Eigenvalues of `A*A` at or below this multiple of `max(m,n)·eps·λ_max`
/// are treated as zero when forming `|A|`; rounding in the Gram product
/// otherwise turns exact zeros into spurious `sqrt(eps)`-sized values.
const MODULUS_CUTOFF_FACTOR: f64 = 16.0;

/// Relative residual above which a carrier-restricted solve is reported as
/// failed.
const SOLVE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    /// `R(A) = R(A*)`
    #[serde(rename = "ep1")]
    Ep1RangeEqual,
    /// `A A† = A† A`
    #[serde(rename = "ep2")]
    Ep2Commute,
    /// `N(A) = N(A†)`
    #[serde(rename = "ep3")]
    Ep3NullDagger,
    /// `N(A) = N(A*)`
    #[serde(rename = "ep4")]
    Ep4NullAdjoint,
    /// `N(A)^⊥ = R(A)`
    #[serde(rename = "ep5")]
    Ep5NullComplement,
    /// closure of the carrier equals `R(A)`
    #[serde(rename = "ep6")]
    Ep6Carrier,
    /// `H = R(A) ⊕ N(A)` (orthogonal)
    #[serde(rename = "ep7")]
    Ep7DirectSum,
    /// `N(A) ⊆ N(A*)`
    #[serde(rename = "hypo1")]
    Hypo1NullInclusion,
    /// `A† A² A† = A A†`
    #[serde(rename = "hypo2")]
    Hypo2DaggerSquare,
    /// `A (A†)² A = A A†`
    #[serde(rename = "chain2")]
    Chain2,
    /// `A A† ≤ A† A`; the residual is the signed minimum eigenvalue of
    /// `A† A − A A†`
    #[serde(rename = "chain3")]
    Chain3,
    /// `||A A† x|| ≤ ||A† A x||` on sampled `x`; the residual is the largest
    /// observed excess
    #[serde(rename = "chain4")]
    Chain4,
}

impl ConditionId {
    pub const EP: [ConditionId; 7] = [
        ConditionId::Ep1RangeEqual,
        ConditionId::Ep2Commute,
        ConditionId::Ep3NullDagger,
        ConditionId::Ep4NullAdjoint,
        ConditionId::Ep5NullComplement,
        ConditionId::Ep6Carrier,
        ConditionId::Ep7DirectSum,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::Ep1RangeEqual => "ep1",
            ConditionId::Ep2Commute => "ep2",
            ConditionId::Ep3NullDagger => "ep3",
            ConditionId::Ep4NullAdjoint => "ep4",
            ConditionId::Ep5NullComplement => "ep5",
            ConditionId::Ep6Carrier => "ep6",
            ConditionId::Ep7DirectSum => "ep7",
            ConditionId::Hypo1NullInclusion => "hypo1",
            ConditionId::Hypo2DaggerSquare => "hypo2",
            ConditionId::Chain2 => "chain2",
            ConditionId::Chain3 => "chain3",
            ConditionId::Chain4 => "chain4",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub id: ConditionId,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub is_ep: bool,
    pub is_hypo_ep: bool,
    pub rank: usize,
    pub gamma: f64,
    pub conditions: Vec<ConditionResult>,
}

impl ClassificationReport {
    pub fn condition(&self, id: ConditionId) -> &ConditionResult {
        self.conditions
            .iter()
            .find(|c| c.id == id)
            .expect("every condition is evaluated")
    }

    pub fn passes(&self, id: ConditionId) -> bool {
        self.condition(id).pass
    }

    /// True when all seven EP conditions reach the same verdict.
    pub fn ep_conditions_agree(&self) -> bool {
        let first = self.passes(ConditionId::Ep1RangeEqual);
        ConditionId::EP.iter().all(|&id| self.passes(id) == first)
    }

    /// Pairs of EP conditions whose verdicts differ.
    pub fn ep_disagreements(&self) -> Vec<(ConditionId, ConditionId)> {
        let mut out = Vec::new();
        for (i, &a) in ConditionId::EP.iter().enumerate() {
            for &b in &ConditionId::EP[i + 1..] {
                if self.passes(a) != self.passes(b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Reduced minimum modulus: the smallest singular value above the rank
/// threshold, `0` for a rank-zero matrix.
pub fn gamma(a: &DenseMatrix, tol: &TolerancePolicy) -> Result<f64> {
    Ok(gamma_from_svd(&svd(a)?, tol))
}

pub fn gamma_from_svd(s: &SvdFactors, tol: &TolerancePolicy) -> f64 {
    match s.rank(tol) {
        0 => 0.0,
        r => s.sigma[r - 1],
    }
}

/// `|A| = (A*A)^{1/2}` through the eigendecomposition of `A*A`.
pub fn modulus(a: &DenseMatrix) -> Result<DenseMatrix> {
    let gram = &a.adjoint() * a;
    let eig = hermitian_eigen(&gram)?;
    let lambda_max = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = MODULUS_CUTOFF_FACTOR * a.rows().max(a.cols()) as f64 * f64::EPSILON * lambda_max;
    let roots: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| if l <= cutoff { 0.0 } else { l.sqrt() })
        .collect();
    let v = &eig.vectors;
    Ok(v * &DenseMatrix::diag_real(&roots) * v.adjoint())
}

pub fn classify(a: &DenseMatrix, tol: &TolerancePolicy) -> Result<ClassificationReport> {
    let n = a.require_square()?;
    let a_star = a.adjoint();
    let s = svd(a)?;
    let rank = s.rank(tol);
    let a_dag = pinv_from_svd(&s, tol);
    let identity = DenseMatrix::identity(n);

    let range_a = range_basis_from(&s, tol);
    let null_a = null_basis_from(&s, tol);
    let p_range = projector(&range_a);
    let p_null = projector(&null_a);
    let range_a_star = range_basis(&a_star, tol)?;
    let null_a_star = null_basis(&a_star, tol)?;
    let dag_svd = svd(&a_dag)?;
    let null_dag = null_basis_from(&dag_svd, tol);
    let carrier_closure = range_basis_from(&dag_svd, tol);

    let a_a_dag = a * &a_dag;
    let a_dag_a = &a_dag * a;

    let mut conditions = Vec::with_capacity(12);
    let mut push =
        |id, residual: f64, pass: bool| conditions.push(ConditionResult { id, residual, pass });
    let within = |r: f64| r <= tol.subspace_tol;

    let ep1 = subspace_equal(&range_a, &range_a_star, tol)?;
    push(ConditionId::Ep1RangeEqual, ep1.residual, ep1.holds);

    let ep2 = op_norm(&(&a_a_dag - &a_dag_a));
    push(ConditionId::Ep2Commute, ep2, within(ep2));

    let ep3 = subspace_equal(&null_a, &null_dag, tol)?;
    push(ConditionId::Ep3NullDagger, ep3.residual, ep3.holds);

    let ep4 = subspace_equal(&null_a, &null_a_star, tol)?;
    push(ConditionId::Ep4NullAdjoint, ep4.residual, ep4.holds);

    let ep5 = op_norm(&(&identity - &p_null - &p_range));
    push(ConditionId::Ep5NullComplement, ep5, within(ep5));

    let ep6 = subspace_equal(&carrier_closure, &range_a, tol)?;
    push(ConditionId::Ep6Carrier, ep6.residual, ep6.holds);

    // orthogonal direct sum: the two projectors must be complementary
    let ep7 = op_norm(&(&p_range + &p_null - &identity));
    push(ConditionId::Ep7DirectSum, ep7, within(ep7));

    let hypo1 = subspace_included(&null_a, &null_a_star, tol)?;
    push(ConditionId::Hypo1NullInclusion, hypo1.residual, hypo1.holds);

    let hypo2 = op_norm(&(&a_dag * a * a * &a_dag - &a_a_dag));
    push(ConditionId::Hypo2DaggerSquare, hypo2, within(hypo2));

    let chain2 = op_norm(&(a * &a_dag * &a_dag * a - &a_a_dag));
    push(ConditionId::Chain2, chain2, within(chain2));

    let chain3 = min_eigenvalue(&(&a_dag_a - &a_a_dag))?;
    push(ConditionId::Chain3, chain3, chain3 >= -tol.psd_tol);

    let mut rng = random::rng(CHAIN_SAMPLE_SEED);
    let chain4 = (0..CHAIN_SAMPLES)
        .map(|_| {
            let x = random::unit_vector(&mut rng, n);
            vec_norm(&a_a_dag.apply(&x)) - vec_norm(&a_dag_a.apply(&x))
        })
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    push(ConditionId::Chain4, chain4, within(chain4));

    let is_ep = ConditionId::EP
        .iter()
        .all(|&id| conditions.iter().any(|c| c.id == id && c.pass));
    let is_hypo_ep = conditions
        .iter()
        .filter(|c| {
            matches!(
                c.id,
                ConditionId::Hypo1NullInclusion | ConditionId::Hypo2DaggerSquare
            )
        })
        .all(|c| c.pass);

    Ok(ClassificationReport {
        is_ep,
        is_hypo_ep,
        rank,
        gamma: gamma_from_svd(&s, tol),
        conditions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureEntry {
    pub name: String,
    pub is_ep: bool,
}

/// For EP `A`, classifies `A*`, `AA*`, `A*A` and `|A|`; all four are EP.
pub fn ep_closure_suite(a: &DenseMatrix, tol: &TolerancePolicy) -> Result<Vec<ClosureEntry>> {
    if !classify(a, tol)?.is_ep {
        return Err(Error::SourceNotEP);
    }
    let a_star = a.adjoint();
    let derived = [
        ("adjoint", a_star.clone()),
        ("a_a_star", a * &a_star),
        ("a_star_a", &a_star * a),
        ("modulus", modulus(a)?),
    ];
    derived
        .into_iter()
        .map(|(name, m)| {
            Ok(ClosureEntry {
                name: name.to_string(),
                is_ep: classify(&m, tol)?.is_ep,
            })
        })
        .collect()
}

/// A bijective `C` with `A* = A C`, available for EP `A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorC {
    pub c: DenseMatrix,
    /// `||A* − A C||`
    pub residual_factorization: f64,
    /// `rank(C) = n`
    pub bijective: bool,
}

/// Builds `C` column by column. Each basis vector `y` splits as `y1 + y2`
/// with `y1` in the carrier of `A*` (which is `R(A)`) and `y2 ∈ N(A*)`; the
/// carrier solution `x1` of `A x = A* y` is found with the pseudoinverse and
/// `C y = x1 + y2`. Since `N(A*) = N(A)` for EP `A`, `A C y = A* y1 = A* y`.
///
/// The decomposition `C y = y1 + x2` (with `x2 ∈ N(A)`) does not satisfy
/// `A* = A C` in general; the form used here does, and the returned residual
/// is the authority either way.
pub fn construct_factor_c(a: &DenseMatrix, tol: &TolerancePolicy) -> Result<FactorC> {
    let n = a.require_square()?;
    if !classify(a, tol)?.is_ep {
        return Err(Error::SourceNotEP);
    }
    let s = svd(a)?;
    let a_dag = pinv_from_svd(&s, tol);
    let a_star = a.adjoint();
    let p_carrier_star = projector(&range_basis_from(&s, tol));
    let scale = residual_scale(a);

    let mut c = DenseMatrix::zeros(n, n);
    let mut worst_solve = 0.0_f64;
    for j in 0..n {
        let mut y = vec![ZERO; n];
        y[j] = ONE;
        let y1 = p_carrier_star.apply(&y);
        let y2: Vec<_> = y.iter().zip(&y1).map(|(a, b)| a - b).collect();
        let rhs = a_star.apply(&y1);
        let x1 = a_dag.apply(&rhs);
        let defect: Vec<_> = a.apply(&x1).iter().zip(&rhs).map(|(a, b)| a - b).collect();
        worst_solve = worst_solve.max(vec_norm(&defect));
        for i in 0..n {
            c.set(i, j, x1[i] + y2[i]);
        }
    }
    if worst_solve > SOLVE_TOL * scale * scale {
        return Err(Error::SolveFailure {
            residual: worst_solve,
        });
    }

    let residual_factorization = op_norm(&(&a_star - &(a * &c)));
    let bijective = svd(&c)?.rank(tol) == n;
    Ok(FactorC {
        c,
        residual_factorization,
        bijective,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorizationWitness {
    /// `k = ||z||` with `A* z = A x`.
    pub k: f64,
    pub z: Vec<crate::numlin::Scalar>,
    /// Largest `|<Ax, y>| − (k + tol)·||Ay||` over the samples.
    pub worst_slack: f64,
    pub samples_ok: bool,
}

/// For hypo-EP `A` and a vector `x`, finds `k` with `|<Ax, y>| ≤ k ||Ay||`
/// for all `y`, via `z` solving `A* z = A x` on the carrier of `A*`, and
/// checks the inequality on random unit `y`.
pub fn majorization_witness(
    a: &DenseMatrix,
    x: &[crate::numlin::Scalar],
    tol: &TolerancePolicy,
    seed: u64,
) -> Result<MajorizationWitness> {
    let n = a.require_square()?;
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a {n}x{n} operator",
            x.len()
        )));
    }
    if !classify(a, tol)?.is_hypo_ep {
        return Err(Error::SourceNotHypoEP);
    }
    let ax = a.apply(x);
    let scale = residual_scale(a);
    let z = if vec_norm(&ax) <= tol.subspace_tol * scale * vec_norm(x) {
        vec![ZERO; n]
    } else {
        let a_star = a.adjoint();
        let z = crate::pinv::pinv(&a_star, tol)?.apply(&ax);
        let defect: Vec<_> = a_star
            .apply(&z)
            .iter()
            .zip(&ax)
            .map(|(p, q)| p - q)
            .collect();
        let residual = vec_norm(&defect);
        if residual > SOLVE_TOL * scale * vec_norm(&ax).max(1.0) {
            return Err(Error::SolveFailure { residual });
        }
        z
    };
    let k = vec_norm(&z);

    let mut rng = random::rng(seed);
    let worst_slack = (0..WITNESS_SAMPLES)
        .map(|_| {
            let y = random::unit_vector(&mut rng, n);
            inner(&ax, &y).norm() - (k + tol.subspace_tol) * vec_norm(&a.apply(&y))
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MajorizationWitness {
        k,
        z,
        worst_slack,
        samples_ok: worst_slack <= 0.0,
    })
}
