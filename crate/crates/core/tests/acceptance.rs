//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines reach stdout uncaptured; exits nonzero on any FAIL.

// `!(x <= tol)` on purpose: a NaN residual must count as a failure
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use eplab_core::classify::{
    classify, construct_factor_c, ep_closure_suite, gamma, ClassificationReport, ConditionId,
};
use eplab_core::douglas::{douglas_factorize, majorization_contraction, range_inclusion_check};
use eplab_core::numlin::{
    null_basis, op_norm, projector, range_basis, residual_scale, svd, DenseMatrix,
};
use eplab_core::opzoo::{
    corpus, diag_alternating, fourier_derivative, gamma_sweep, generate, CorpusEntry, Family,
    OperatorSpec,
};
use eplab_core::perturb::{check_perturbation, generate_admissible};
use eplab_core::pinv::{dagger_identities, penrose_verify, pinv};
use eplab_core::{random, TolerancePolicy};

const SEED: u64 = 20_240_601;
const CORPUS_SIZE: usize = 1000;
const CORPUS_MAX_N: usize = 32;
const RUNTIME_BUDGET: Duration = Duration::from_secs(30);

struct Line {
    id: u32,
    pass: bool,
    text: String,
}

fn line(id: u32, pass: bool, text: String) -> Line {
    Line { id, pass, text }
}

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn main() -> ExitCode {
    let t = tol();
    let entries = corpus(SEED, CORPUS_SIZE, CORPUS_MAX_N);

    // serial on purpose: the runtime budget is about classification cost
    let start = Instant::now();
    let reports: Vec<ClassificationReport> = entries
        .iter()
        .map(|e| classify(&e.matrix, &t).expect("classify"))
        .collect();
    let elapsed = start.elapsed();

    let lines = vec![
        criterion_1(&entries, &reports, elapsed),
        criterion_2(&entries, &reports),
        criterion_3(&reports),
        criterion_4(&entries),
        criterion_5(&entries),
        criterion_6(&entries),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(&entries),
    ];

    let mut failed = 0;
    for l in &lines {
        let verdict = if l.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{verdict}] {}", l.id, l.text);
        if !l.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        lines.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn criterion_1(
    entries: &[CorpusEntry],
    reports: &[ClassificationReport],
    elapsed: Duration,
) -> Line {
    let disagreeing = reports.iter().filter(|r| !r.ep_conditions_agree()).count();
    // structural verdicts double as an oracle where the construction fixes them
    let wrong_known = entries
        .iter()
        .zip(reports)
        .filter(|(e, r)| e.known_ep.is_some_and(|k| k != r.is_ep))
        .count();
    let known = entries.iter().filter(|e| e.known_ep.is_some()).count();
    let sizes_ok = entries.iter().all(|e| e.matrix.rows() <= CORPUS_MAX_N);
    line(
        1,
        disagreeing == 0 && wrong_known == 0 && sizes_ok && elapsed < RUNTIME_BUDGET,
        format!(
            "seven-way EP equivalence: {disagreeing} of {} matrices disagree, \
             {wrong_known} of {known} structural verdicts wrong, classified in {:.2} s (budget {} s)",
            reports.len(),
            elapsed.as_secs_f64(),
            RUNTIME_BUDGET.as_secs()
        ),
    )
}

fn criterion_2(entries: &[CorpusEntry], reports: &[ClassificationReport]) -> Line {
    let bad = reports.iter().filter(|r| r.is_ep != r.is_hypo_ep).count();
    let ep = reports.iter().filter(|r| r.is_ep).count();
    line(
        2,
        bad == 0,
        format!(
            "is_ep = is_hypo_ep: {bad} of {} differ ({ep} EP, {} not EP)",
            entries.len(),
            entries.len() - ep
        ),
    )
}

fn criterion_3(reports: &[ClassificationReport]) -> Line {
    let chain = [
        ConditionId::Hypo2DaggerSquare,
        ConditionId::Chain2,
        ConditionId::Chain3,
        ConditionId::Chain4,
    ];
    let mut violations = 0;
    let mut hypo2_holds = 0;
    for r in reports {
        if r.passes(ConditionId::Hypo2DaggerSquare) {
            hypo2_holds += 1;
        }
        for w in chain.windows(2) {
            if r.passes(w[0]) && !r.passes(w[1]) {
                violations += 1;
            }
        }
    }
    line(
        3,
        violations == 0,
        format!(
            "hypo2 => chain2 => chain3 => chain4: {violations} violations ({hypo2_holds} matrices satisfy hypo2)"
        ),
    )
}

fn criterion_4(entries: &[CorpusEntry]) -> Line {
    let t = tol();
    let ratios: Vec<(f64, usize)> = entries
        .par_iter()
        .map(|e| {
            let a = &e.matrix;
            let p = penrose_verify(a, &pinv(a, &t).unwrap(), &t).unwrap();
            (
                p.max_residual() / residual_scale(a),
                svd(a).unwrap().rank(&t),
            )
        })
        .collect();
    let worst = ratios.iter().fold(0.0_f64, |m, r| m.max(r.0));
    let bad = ratios.iter().filter(|r| !(r.0 <= 1e-10)).count();
    let rank0 = ratios.iter().filter(|r| r.1 == 0).count();
    let rank1 = ratios.iter().filter(|r| r.1 == 1).count();
    line(
        4,
        bad == 0 && rank0 > 0 && rank1 > 0,
        format!(
            "Penrose residuals <= 1e-10 max(1,||A||): {bad} failures, worst ratio {worst:.2e}, \
             {rank0} rank-0 and {rank1} rank-1 matrices included"
        ),
    )
}

fn criterion_5(entries: &[CorpusEntry]) -> Line {
    let t = tol();
    let worst: Vec<(f64, String)> = entries
        .par_iter()
        .map(|e| {
            dagger_identities(&e.matrix, &t)
                .unwrap()
                .into_iter()
                .map(|r| (r.residual, r.id))
                .fold(
                    (0.0, String::new()),
                    |acc, r| if r.0 > acc.0 { r } else { acc },
                )
        })
        .collect();
    let bad = worst.iter().filter(|w| !(w.0 <= 1e-9)).count();
    let top = worst.iter().fold(
        (0.0, ""),
        |acc, w| if w.0 > acc.0 { (w.0, &w.1) } else { acc },
    );
    line(
        5,
        bad == 0,
        format!(
            "dagger identities <= 1e-9: {bad} failing matrices, worst {:.2e} ({})",
            top.0,
            if top.1.is_empty() { "none" } else { top.1 }
        ),
    )
}

fn criterion_6(entries: &[CorpusEntry]) -> Line {
    let t = tol();
    let rows: Vec<Option<(f64, f64)>> = entries
        .par_iter()
        .map(|e| {
            let a = &e.matrix;
            let g = gamma(a, &t).unwrap();
            if svd(a).unwrap().rank(&t) == 0 {
                return None;
            }
            let link = (g * op_norm(&pinv(a, &t).unwrap()) - 1.0).abs();
            let sym = (g - gamma(&a.adjoint(), &t).unwrap()).abs();
            Some((link, sym))
        })
        .collect();
    let nonzero: Vec<(f64, f64)> = rows.into_iter().flatten().collect();
    let link_bad = nonzero.iter().filter(|r| !(r.0 <= 1e-9)).count();
    let sym_bad = nonzero.iter().filter(|r| !(r.1 <= 1e-10)).count();
    let worst_link = nonzero.iter().fold(0.0_f64, |m, r| m.max(r.0));
    let worst_sym = nonzero.iter().fold(0.0_f64, |m, r| m.max(r.1));
    line(
        6,
        link_bad == 0 && sym_bad == 0,
        format!(
            "gamma duality over {} nonzero matrices: |gamma ||A+|| - 1| worst {worst_link:.2e} \
             ({link_bad} > 1e-9), |gamma(A) - gamma(A*)| worst {worst_sym:.2e} ({sym_bad} > 1e-10)",
            nonzero.len()
        ),
    )
}

/// Seeded EP matrices `V M V*` of size up to 32 and every rank from 0 to n.
fn ep_samples(count: usize, seed: u64) -> Vec<DenseMatrix> {
    (0..count)
        .map(|i| {
            let mut rng = random::rng(seed.wrapping_add(i as u64));
            let n = 1 + (random::uniform(&mut rng, 0.0, 32.0) as usize).min(31);
            let rank = (random::uniform(&mut rng, 0.0, (n + 1) as f64) as usize).min(n);
            random::ep_matrix(&mut rng, n, rank, 0.5, 2.0)
        })
        .collect()
}

fn criterion_7() -> Line {
    let t = tol();
    let samples = ep_samples(200, SEED ^ 0x7);
    let failures: Vec<String> = samples
        .par_iter()
        .flat_map_iter(|a| {
            ep_closure_suite(a, &t)
                .unwrap()
                .into_iter()
                .filter(|c| !c.is_ep)
                .map(|c| c.name)
        })
        .collect();
    let all_ep = samples.iter().all(|a| classify(a, &t).unwrap().is_ep);
    line(
        7,
        all_ep && failures.is_empty(),
        format!(
            "EP closure (A*, AA*, A*A, |A|) over {} EP matrices: {} non-EP members{}",
            samples.len(),
            failures.len(),
            failures
                .first()
                .map(|f| format!(", first {f}"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_8() -> Line {
    let t = tol();
    let samples = ep_samples(200, SEED ^ 0x7);
    let rows: Vec<(f64, bool)> = samples
        .par_iter()
        .map(|a| {
            let f = construct_factor_c(a, &t).unwrap();
            let recomputed = op_norm(&(a.adjoint() - a * &f.c));
            let ratio = recomputed.max(f.residual_factorization) / residual_scale(a);
            // rank through an independent SVD rather than the reported flag
            let full = svd(&f.c).unwrap().rank(&t) == a.rows();
            (ratio, full && f.bijective)
        })
        .collect();
    let worst = rows.iter().fold(0.0_f64, |m, r| m.max(r.0));
    let residual_bad = rows.iter().filter(|r| !(r.0 <= 1e-9)).count();
    let rank_bad = rows.iter().filter(|r| !r.1).count();
    line(
        8,
        residual_bad == 0 && rank_bad == 0,
        format!(
            "factor C over {} EP matrices: ||A* - AC|| / max(1,||A||) worst {worst:.2e} \
             ({residual_bad} > 1e-9), {rank_bad} with rank(C) < n",
            rows.len()
        ),
    )
}

/// `B` (m x p, rank r) and `C` (p x q), seeded.
fn douglas_pair(seed: u64) -> (DenseMatrix, DenseMatrix) {
    let mut rng = random::rng(seed);
    let mut dim = || 1 + (random::uniform(&mut rng, 0.0, 12.0) as usize).min(11);
    let (m, p, q) = (dim(), dim(), dim());
    let r = (random::uniform(&mut rng, 0.0, (m.min(p) + 1) as f64) as usize).min(m.min(p));
    let b = random::with_singular_values(&mut rng, m, p, r, 0.5, 2.0);
    let c = random::gaussian_matrix(&mut rng, p, q);
    (b, c)
}

fn criterion_9() -> Line {
    let t = tol();
    let inclusion: Vec<(bool, f64, f64, bool)> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let (b, c) = douglas_pair(SEED ^ (0x9000 + i));
            let a = &b * &c;
            let inc = range_inclusion_check(&a, &b, &t).unwrap();
            if !inc.holds {
                return (false, inc.residual, f64::NAN, false);
            }
            let d = douglas_factorize(&a, &b, &t, i).unwrap();
            let independent = op_norm(&(&b * &d.factor_c - &a));
            (
                true,
                inc.residual,
                independent.max(d.residual_bc_a),
                d.bound_k.is_finite(),
            )
        })
        .collect();
    let inc_bad = inclusion.iter().filter(|r| !r.0).count();
    let verified: Vec<_> = inclusion.iter().filter(|r| r.0).collect();
    let fact_bad = verified.iter().filter(|r| !(r.2 <= 1e-9) || !r.3).count();
    let worst_fact = verified.iter().fold(0.0_f64, |m, r| m.max(r.2));

    // A = B K with ||K|| <= 1 gives AA* = B KK* B* <= BB*
    let majorized: Vec<Option<f64>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = random::rng(SEED ^ (0x9900 + i));
            let (b, _) = douglas_pair(SEED ^ (0x9a00 + i));
            let (m, p) = b.shape();
            let q = 1 + (random::uniform(&mut rng, 0.0, 8.0) as usize).min(7);
            let k_norm = random::uniform(&mut rng, 0.1, 1.0);
            let k = random::with_singular_values(&mut rng, p, q, p.min(q), 0.0, 1.0);
            let k = k.scale_real(k_norm / op_norm(&k).max(f64::MIN_POSITIVE));
            let a = &b * &k;
            debug_assert_eq!(a.rows(), m);
            let report = majorization_contraction(&a, &b, &t, i).ok()?;
            let gap = report.majorization_gap?;
            (gap >= -t.psd_tol).then(|| op_norm(&(pinv(&b, &t).unwrap() * &a)))
        })
        .collect();
    let psd_verified: Vec<f64> = majorized.iter().flatten().copied().collect();
    let contraction_bad = psd_verified.iter().filter(|&&n| !(n <= 1.0 + 1e-9)).count();
    let worst_contraction = psd_verified.iter().fold(0.0_f64, |m, &n| m.max(n));

    line(
        9,
        inc_bad == 0
            && verified.len() == 500
            && fact_bad == 0
            && psd_verified.len() == 200
            && contraction_bad == 0,
        format!(
            "Douglas: inclusion fails on {inc_bad} of 500 (B, BC) pairs; factorization over {} \
             verified pairs worst ||BC - A|| {worst_fact:.2e} ({fact_bad} bad); \
             ||B+ A|| over {} PSD-verified pairs worst {worst_contraction:.12} ({contraction_bad} > 1 + 1e-9)",
            verified.len(),
            psd_verified.len()
        ),
    )
}

fn criterion_10() -> Line {
    let t = tol();
    let scales = [0.1, 0.5, 0.9];
    // the zero matrix admits only B = 0; keep it out so every pair is a real perturbation
    let sources: Vec<DenseMatrix> = ep_samples(600, SEED ^ 0x10)
        .into_iter()
        .filter(|a| svd(a).unwrap().rank(&t) > 0)
        .take(500)
        .collect();
    let rows: Vec<(bool, bool, f64)> = sources
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let scale = scales[i % scales.len()];
            let b = generate_admissible(a, scale, SEED.wrapping_add(i as u64), &t).unwrap();
            let r = check_perturbation(a, &b, &t).unwrap();
            let gamma_margin = r.gamma_sum - (r.gamma_a - r.norm_b);
            let ok = r.concl_ep
                && r.concl_null_equal.holds
                && r.concl_range_equal.holds
                && gamma_margin >= -1e-9;
            (r.hypotheses_pass, ok, gamma_margin)
        })
        .collect();
    let hyp_bad = rows.iter().filter(|r| !r.0).count();
    let concl_bad = rows.iter().filter(|r| !r.1).count();
    let min_margin = rows.iter().fold(f64::INFINITY, |m, r| m.min(r.2));
    line(
        10,
        rows.len() == 500 && hyp_bad == 0 && concl_bad == 0,
        format!(
            "perturbation over {} admissible pairs at scales 0.1/0.5/0.9: {hyp_bad} hypothesis \
             failures, {concl_bad} conclusion failures, min gamma(A+B) - (gamma(A) - ||B||) = {min_margin:.2e}",
            rows.len()
        ),
    )
}

fn criterion_11() -> Line {
    let t = tol();
    let mut problems = Vec::new();

    for family in [
        Family::DiagHarmonic,
        Family::MultInvSqrt,
        Family::FourierDerivative,
    ] {
        let from = if family == Family::FourierDerivative {
            3
        } else {
            2
        };
        let non_ep: Vec<usize> = (from..=64)
            .into_par_iter()
            .filter(|&n| {
                let (a, _) = generate(&OperatorSpec::new(family, n)).unwrap();
                !classify(&a, &t).unwrap().is_ep
            })
            .collect();
        if !non_ep.is_empty() {
            problems.push(format!("{} not EP at n={non_ep:?}", family.name()));
        }
    }

    let worst_fourier = (3..=64usize)
        .into_par_iter()
        .map(|n| {
            let p = projector(&range_basis(&fourier_derivative(n), &t).unwrap());
            let mean_free = DenseMatrix::identity(n)
                - DenseMatrix::from_fn(n, n, |_, _| Complex64::new(1.0 / n as f64, 0.0));
            op_norm(&(p - mean_free))
        })
        .reduce(|| 0.0, f64::max);
    if !(worst_fourier <= 1e-9) {
        problems.push(format!(
            "Fourier range projector off by {worst_fourier:.2e}"
        ));
    }

    let odd: Vec<usize> = (0..32).map(|k| 2 * k + 1).collect();
    let sweep = gamma_sweep(Family::DiagAlternating, &odd, &t).unwrap();
    let exact = sweep
        .iter()
        .all(|row| row.gamma == 1.0 / row.n as f64 && row.rank == row.n);
    let decreasing = sweep.windows(2).all(|w| w[1].gamma < w[0].gamma);
    // the sweep itself must agree with a direct reading of the section
    let direct = odd
        .iter()
        .all(|&n| gamma(&diag_alternating(n), &t).unwrap() == 1.0 / n as f64);
    if !(exact && decreasing && direct) {
        problems.push(format!(
            "DiagAlternating sweep exact={exact} decreasing={decreasing} direct={direct}"
        ));
    }

    let mismatched: Vec<usize> = (1..=64usize)
        .filter(|&n| {
            let (a, traits) = generate(&OperatorSpec::new(Family::WeightedShift, n)).unwrap();
            let r = classify(&a, &t).unwrap();
            traits.section_outcome() != (r.is_ep, r.is_hypo_ep)
        })
        .collect();
    if !mismatched.is_empty() {
        problems.push(format!(
            "WeightedShift differs from its note at n={mismatched:?}"
        ));
    }

    line(
        11,
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "zoo fidelity: DiagHarmonic/MultInvSqrt/FourierDerivative EP for n <= 64, \
                 Fourier range projector within {worst_fourier:.2e} of 1-perp, \
                 DiagAlternating gamma = 1/n exactly over odd n <= 63, WeightedShift n = 1..64 as documented"
            )
        } else {
            format!("zoo fidelity: {}", problems.join("; "))
        },
    )
}

// brute-force subspace oracle on plain row-major vectors

type Vector = Vec<Complex64>;

const ORACLE_PIVOT: f64 = 1e-8;

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram-Schmidt with one reorthogonalization pass; vectors whose
/// remainder falls below the pivot relative to `scale` are dropped.
fn gram_schmidt(vectors: &[Vector], scale: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let len = norm(&w);
        if len > ORACLE_PIVOT * scale {
            basis.push(w.into_iter().map(|x| x / len).collect());
        }
    }
    basis
}

/// Nullspace from the reduced row echelon form with partial pivoting.
fn rref_nullspace(rows: &[Vector], cols: usize, scale: f64) -> Vec<Vector> {
    let mut m: Vec<Vector> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let best = (r..m.len())
            .max_by(|&i, &j| m[i][c].norm().total_cmp(&m[j][c].norm()))
            .unwrap();
        if m[best][c].norm() <= ORACLE_PIVOT * scale {
            continue;
        }
        m.swap(r, best);
        let p = m[r][c];
        for x in m[r].iter_mut() {
            *x /= p;
        }
        for i in 0..m.len() {
            if i != r {
                let f = m[i][c];
                if f != Complex64::new(0.0, 0.0) {
                    let pivot_row = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Complex64::new(0.0, 0.0); cols];
            v[f] = Complex64::new(1.0, 0.0);
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[k][f];
            }
            v
        })
        .collect()
}

fn oracle_projector(basis: &[Vector], n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| basis.iter().map(|q| q[i] * q[j].conj()).sum())
}

fn criterion_12(entries: &[CorpusEntry]) -> Line {
    let t = tol();
    let small: Vec<&CorpusEntry> = entries.iter().filter(|e| e.matrix.rows() <= 6).collect();
    let rows: Vec<(f64, f64, bool)> = small
        .par_iter()
        .map(|e| {
            let a = &e.matrix;
            let n = a.rows();
            let scale = residual_scale(a);
            let columns: Vec<Vector> = (0..n).map(|j| a.column_vector(j)).collect();
            let row_vecs: Vec<Vector> = (0..n)
                .map(|i| (0..n).map(|j| a.get(i, j)).collect())
                .collect();
            let range = gram_schmidt(&columns, scale);
            let null = gram_schmidt(&rref_nullspace(&row_vecs, n, scale), 1.0);
            let lib_range = range_basis(a, &t).unwrap();
            let lib_null = null_basis(a, &t).unwrap();
            // Frobenius bounds the spectral distance from above
            let d_range = (oracle_projector(&range, n) - projector(&lib_range)).frobenius_norm();
            let d_null = (oracle_projector(&null, n) - projector(&lib_null)).frobenius_norm();
            let dims = range.len() == lib_range.dim() && null.len() == lib_null.dim();
            (d_range, d_null, dims && range.len() + null.len() == n)
        })
        .collect();
    let bad = rows
        .iter()
        .filter(|r| !(r.0 <= 1e-8 && r.1 <= 1e-8 && r.2))
        .count();
    let worst = rows.iter().fold(0.0_f64, |m, r| m.max(r.0).max(r.1));
    line(
        12,
        bad == 0 && !rows.is_empty(),
        format!(
            "oracle cross-check over {} matrices with n <= 6: {bad} disagree, worst projector distance {worst:.2e}",
            rows.len()
        ),
    )
}
