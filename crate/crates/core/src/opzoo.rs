//! Finite sections of classical example operators and seeded random
//! families, each tagged with the classification it is expected to receive.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classify::{classify, gamma_from_svd};
use crate::error::{Error, Result};
use crate::numlin::matrix::{c64, DenseJson, I};
use crate::numlin::{svd, DenseMatrix, TolerancePolicy};
use crate::random;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    DiagHarmonic,
    DiagAlternating,
    WeightedShift,
    MultInvSqrt,
    FourierDerivative,
    RandomClosedRange,
    RandomEP,
    Custom,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::DiagHarmonic,
        Family::DiagAlternating,
        Family::WeightedShift,
        Family::MultInvSqrt,
        Family::FourierDerivative,
        Family::RandomClosedRange,
        Family::RandomEP,
        Family::Custom,
    ];

    pub fn is_deterministic(self) -> bool {
        matches!(
            self,
            Family::DiagHarmonic
                | Family::DiagAlternating
                | Family::WeightedShift
                | Family::MultInvSqrt
                | Family::FourierDerivative
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::DiagHarmonic => "DiagHarmonic",
            Family::DiagAlternating => "DiagAlternating",
            Family::WeightedShift => "WeightedShift",
            Family::MultInvSqrt => "MultInvSqrt",
            Family::FourierDerivative => "FourierDerivative",
            Family::RandomClosedRange => "RandomClosedRange",
            Family::RandomEP => "RandomEP",
            Family::Custom => "Custom",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::BadSpec(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expectation {
    Yes,
    No,
    /// The infinite-dimensional operator and its finite sections disagree.
    DivergesFromPaper,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedTraits {
    pub ep: Expectation,
    pub hypo_ep: Expectation,
    pub note: String,
    /// What the section itself classifies as, where it differs from the
    /// infinite-dimensional answer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section_ep: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section_hypo_ep: Option<bool>,
}

impl ExpectedTraits {
    fn plain(ep: bool, note: &str) -> Self {
        let e = if ep {
            Expectation::Yes
        } else {
            Expectation::No
        };
        Self {
            ep: e,
            hypo_ep: e,
            note: note.to_string(),
            section_ep: None,
            section_hypo_ep: None,
        }
    }

    /// Expected `(is_ep, is_hypo_ep)` of the finite section.
    pub fn section_outcome(&self) -> (bool, bool) {
        let resolve = |e: Expectation, section: Option<bool>| match (section, e) {
            (Some(v), _) => v,
            (None, Expectation::Yes) => true,
            (None, _) => false,
        };
        (
            resolve(self.ep, self.section_ep),
            resolve(self.hypo_ep, self.section_hypo_ep),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let diverges = self.ep == Expectation::DivergesFromPaper
            || self.hypo_ep == Expectation::DivergesFromPaper;
        if diverges && self.note.trim().is_empty() {
            return Err(Error::BadSpec(
                "a diverging expectation needs an explanatory note".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub family: Family,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedTraits>,
    /// Entries for `Custom`, in the dense JSON layout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<DenseJson>,
}

impl OperatorSpec {
    pub fn new(family: Family, n: usize) -> Self {
        Self {
            family,
            n,
            rank: None,
            seed: None,
            expected: None,
            matrix: None,
        }
    }

    pub fn with_rank(mut self, rank: usize) -> Self {
        self.rank = Some(rank);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

pub fn generate(spec: &OperatorSpec) -> Result<(DenseMatrix, ExpectedTraits)> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::BadSpec("section size must be positive".into()));
    }
    if let Some(r) = spec.rank {
        if r > n {
            return Err(Error::BadSpec(format!("rank {r} exceeds size {n}")));
        }
    }
    let seed = spec.seed.unwrap_or(0);
    let out = match spec.family {
        Family::DiagHarmonic => (
            diag_harmonic(n),
            ExpectedTraits::plain(true, "diagonal with entries 1..n; EP with closed range"),
        ),
        Family::DiagAlternating => (
            diag_alternating(n),
            ExpectedTraits::plain(
                true,
                "every section is an invertible diagonal, hence EP; the reduced minimum \
                 modulus 1/n (n odd) tends to zero, so the limit operator has a non-closed range",
            ),
        ),
        Family::WeightedShift => (weighted_shift(n), weighted_shift_traits(n)),
        Family::MultInvSqrt => (
            mult_inv_sqrt(n),
            ExpectedTraits::plain(
                true,
                "multiplication by 1/sqrt(t) on a midpoint grid; invertible",
            ),
        ),
        Family::FourierDerivative => {
            if n < 2 {
                return Err(Error::BadSpec("FourierDerivative needs n >= 2".into()));
            }
            (
                fourier_derivative(n),
                ExpectedTraits::plain(
                    true,
                    "Hermitian periodic derivative; null space is the constants and the range \
                     is their orthogonal complement",
                ),
            )
        }
        Family::RandomClosedRange => {
            let r = require_rank(spec)?;
            let mut rng = random::rng(seed);
            let a = random::with_singular_values(&mut rng, n, n, r, 0.5, 2.0);
            let ep = r == n || r == 0;
            (
                a,
                ExpectedTraits::plain(
                    ep,
                    "random rank-r matrix; EP only when r is 0 or n (generic frames otherwise)",
                ),
            )
        }
        Family::RandomEP => {
            let r = require_rank(spec)?;
            let mut rng = random::rng(seed);
            (
                random::ep_matrix(&mut rng, n, r, 0.5, 2.0),
                ExpectedTraits::plain(true, "V M V* with orthonormal V and invertible M"),
            )
        }
        Family::Custom => custom(spec)?,
    };
    out.1.validate()?;
    Ok(out)
}

fn require_rank(spec: &OperatorSpec) -> Result<usize> {
    spec.rank
        .ok_or_else(|| Error::BadSpec(format!("{} needs a rank", spec.family.name())))
}

fn custom(spec: &OperatorSpec) -> Result<(DenseMatrix, ExpectedTraits)> {
    let json = spec
        .matrix
        .clone()
        .ok_or_else(|| Error::BadSpec("Custom needs a matrix".into()))?;
    let a = json.into_matrix()?;
    if a.shape() != (spec.n, spec.n) {
        return Err(Error::BadSpec(format!(
            "Custom matrix is {}x{}, spec says n = {}",
            a.rows(),
            a.cols(),
            spec.n
        )));
    }
    let traits = match &spec.expected {
        Some(t) => t.clone(),
        None => {
            let report = classify(&a, &TolerancePolicy::default())?;
            ExpectedTraits::plain(report.is_ep, "classified numerically at default tolerance")
        }
    };
    Ok((a, traits))
}

fn weighted_shift_traits(n: usize) -> ExpectedTraits {
    let mut t = ExpectedTraits {
        ep: Expectation::No,
        hypo_ep: Expectation::DivergesFromPaper,
        note: "the infinite shift (0, x1, 2x2, 3x3, ...) is hypo-EP but not EP; a section has \
               N(A_n) = span{e_n} and N(A_n*) = span{e_1}, so it is neither"
            .into(),
        section_ep: Some(false),
        section_hypo_ep: Some(false),
    };
    if n == 1 {
        // the 1x1 section is the zero matrix
        t.section_ep = Some(true);
        t.section_hypo_ep = Some(true);
    }
    t
}

pub fn diag_harmonic(n: usize) -> DenseMatrix {
    let d: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    DenseMatrix::diag_real(&d)
}

/// `diag(1, 2, 1/3, 4, 1/5, ...)`.
pub fn diag_alternating(n: usize) -> DenseMatrix {
    let d: Vec<f64> = (1..=n)
        .map(|k| if k % 2 == 0 { k as f64 } else { 1.0 / k as f64 })
        .collect();
    DenseMatrix::diag_real(&d)
}

/// Subdiagonal `1, 2, ..., n-1`.
pub fn weighted_shift(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| {
        if i == j + 1 {
            c64((j + 1) as f64, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// `diag(1/sqrt(t_i))` with `t_i = (i - 1/2)/n`.
pub fn mult_inv_sqrt(n: usize) -> DenseMatrix {
    let d: Vec<f64> = (1..=n)
        .map(|i| 1.0 / ((i as f64 - 0.5) / n as f64).sqrt())
        .collect();
    DenseMatrix::diag_real(&d)
}

/// `i D` with `D` the periodic central difference on `n` points of `[0, 1)`.
///
/// For even `n` the stencil also annihilates the alternating vector, a
/// spurious mode the derivative does not have. Its eigenvalue is set to
/// `pi n`, the derivative's value at that frequency, which keeps the matrix
/// Hermitian with the constants as the only null direction.
pub fn fourier_derivative(n: usize) -> DenseMatrix {
    let half_inv_h = n as f64 / 2.0;
    let mut a = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let next = (j + 1) % n;
        let prev = (j + n - 1) % n;
        a.set(j, next, a.get(j, next) + I * half_inv_h);
        a.set(j, prev, a.get(j, prev) - I * half_inv_h);
    }
    if n.is_multiple_of(2) {
        // pi n w w^T with w_j = (-1)^j / sqrt(n)
        let lift = PI;
        let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        for j in 0..n {
            for k in 0..n {
                a.set(j, k, a.get(j, k) + c64(lift * sign(j) * sign(k), 0.0));
            }
        }
    }
    a
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub gamma: f64,
    pub rank: usize,
}

pub fn gamma_sweep(
    family: Family,
    sizes: &[usize],
    tol: &TolerancePolicy,
) -> Result<Vec<SweepRow>> {
    if !family.is_deterministic() {
        return Err(Error::BadSpec(format!(
            "{} is not a deterministic family",
            family.name()
        )));
    }
    sizes
        .iter()
        .map(|&n| {
            let (a, _) = generate(&OperatorSpec::new(family, n))?;
            let s = svd(&a)?;
            Ok(SweepRow {
                n,
                gamma: gamma_from_svd(&s, tol),
                rank: s.rank(tol),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorpusFamily {
    Random,
    Hermitian,
    Normal,
    Nilpotent,
    EpByConstruction,
    RankZero,
    RankOne,
}

impl CorpusFamily {
    pub const ALL: [CorpusFamily; 7] = [
        CorpusFamily::Random,
        CorpusFamily::Hermitian,
        CorpusFamily::Normal,
        CorpusFamily::Nilpotent,
        CorpusFamily::EpByConstruction,
        CorpusFamily::RankZero,
        CorpusFamily::RankOne,
    ];
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub index: usize,
    pub family: CorpusFamily,
    pub matrix: DenseMatrix,
    /// Structural EP verdict where the construction fixes it.
    pub known_ep: Option<bool>,
}

/// Seeded square test matrices of size `1..=max_n`, cycling through the
/// corpus families. Nonzero singular values stay in `[0.5, 2]` so that every
/// rank decision is well separated from the threshold.
pub fn corpus(seed: u64, count: usize, max_n: usize) -> Vec<CorpusEntry> {
    (0..count)
        .map(|index| {
            let family = CorpusFamily::ALL[index % CorpusFamily::ALL.len()];
            let mut rng = random::rng(seed.wrapping_mul(0x9e37_79b9).wrapping_add(index as u64));
            let n = 1 + (random::uniform(&mut rng, 0.0, max_n as f64) as usize).min(max_n - 1);
            let (matrix, known_ep) = corpus_matrix(family, n, &mut rng);
            CorpusEntry {
                index,
                family,
                matrix,
                known_ep,
            }
        })
        .collect()
}

fn corpus_matrix(
    family: CorpusFamily,
    n: usize,
    rng: &mut random::SeededRng,
) -> (DenseMatrix, Option<bool>) {
    let draw_rank =
        |rng: &mut random::SeededRng| (random::uniform(rng, 0.0, (n + 1) as f64) as usize).min(n);
    match family {
        CorpusFamily::Random => {
            let r = draw_rank(rng);
            let a = random::with_singular_values(rng, n, n, r, 0.5, 2.0);
            let known = if r == 0 || r == n { Some(true) } else { None };
            (a, known)
        }
        CorpusFamily::Hermitian | CorpusFamily::Normal => {
            let r = draw_rank(rng);
            let u = random::unitary(rng, n);
            let eig: Vec<_> = (0..n)
                .map(|k| {
                    if k >= r {
                        return c64(0.0, 0.0);
                    }
                    let modulus = random::uniform(rng, 0.5, 2.0);
                    if family == CorpusFamily::Hermitian {
                        let sign = if random::uniform(rng, 0.0, 1.0) < 0.5 {
                            -1.0
                        } else {
                            1.0
                        };
                        c64(sign * modulus, 0.0)
                    } else {
                        let theta = random::uniform(rng, 0.0, 2.0 * PI);
                        c64(0.0, theta).exp() * modulus
                    }
                })
                .collect();
            (&u * &DenseMatrix::diag(&eig) * u.adjoint(), Some(true))
        }
        CorpusFamily::Nilpotent => {
            // unitarily rotated weighted shift: rank n-1, A^n = 0
            let u = random::unitary(rng, n);
            let mut shift = DenseMatrix::zeros(n, n);
            for k in 0..n.saturating_sub(1) {
                shift.set(k, k + 1, c64(random::uniform(rng, 0.5, 2.0), 0.0));
            }
            (&u * &shift * u.adjoint(), Some(n == 1))
        }
        CorpusFamily::EpByConstruction => {
            let r = draw_rank(rng);
            (random::ep_matrix(rng, n, r, 0.5, 2.0), Some(true))
        }
        CorpusFamily::RankZero => (DenseMatrix::zeros(n, n), Some(true)),
        CorpusFamily::RankOne => {
            let x = random::unit_vector(rng, n);
            let y = random::unit_vector(rng, n);
            let s = random::uniform(rng, 0.5, 2.0);
            let a = DenseMatrix::from_fn(n, n, |i, j| x[i] * y[j].conj() * s);
            (a, if n == 1 { Some(true) } else { None })
        }
    }
}
