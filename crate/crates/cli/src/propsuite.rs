//! Runs the equivalence, chain, closure, dagger and Douglas checks over a
//! seeded corpus and collects every disagreement.

use std::fmt::Write as _;

use rayon::prelude::*;

use eplab_core::classify::{classify, ep_closure_suite, ConditionId};
use eplab_core::douglas::{douglas_factorize, range_inclusion_check};
use eplab_core::numlin::residual_scale;
use eplab_core::opzoo::{corpus, CorpusEntry};
use eplab_core::pinv::{dagger_identities, penrose_verify, pinv};
use eplab_core::{random, DenseMatrix, Error, TolerancePolicy};

use crate::io::{render, Format};

#[derive(Clone, Debug)]
pub struct Disagreement {
    pub index: usize,
    pub check: &'static str,
    pub detail: String,
    pub matrix: DenseMatrix,
}

pub struct Summary {
    pub seed: u64,
    pub count: usize,
    pub max_n: usize,
    pub disagreements: Vec<Disagreement>,
}

impl Summary {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "propsuite seed={} count={} max_n={}",
            self.seed, self.count, self.max_n
        );
        let _ = writeln!(
            out,
            "checked {} matrices, {} disagreements",
            self.count,
            self.disagreements.len()
        );
        for (k, d) in self.disagreements.iter().enumerate() {
            let _ = writeln!(
                out,
                "disagreement: matrix {} ({}x{}) check {}: {}",
                d.index,
                d.matrix.rows(),
                d.matrix.cols(),
                d.check,
                d.detail
            );
            // entries are grouped by matrix; print each counterexample once
            let last_of_matrix = self
                .disagreements
                .get(k + 1)
                .is_none_or(|next| next.index != d.index);
            if last_of_matrix {
                let _ = write!(
                    out,
                    "matrix {}: {}",
                    d.index,
                    render(&d.matrix, Format::Json)
                );
            }
        }
        out
    }
}

pub fn run(seed: u64, count: usize, max_n: usize, tol: &TolerancePolicy) -> Summary {
    let entries = corpus(seed, count, max_n);
    // collect keeps index order regardless of which thread finishes first
    let per_matrix: Vec<Vec<Disagreement>> = entries
        .par_iter()
        .map(|e| check_one(e, seed, tol))
        .collect();
    Summary {
        seed,
        count,
        max_n,
        disagreements: per_matrix.into_iter().flatten().collect(),
    }
}

fn check_one(entry: &CorpusEntry, seed: u64, tol: &TolerancePolicy) -> Vec<Disagreement> {
    let a = &entry.matrix;
    let mut found = Vec::new();
    let mut flag = |check: &'static str, detail: String| {
        found.push(Disagreement {
            index: entry.index,
            check,
            detail,
            matrix: a.clone(),
        })
    };
    if let Err(e) = checks(entry, seed, tol, &mut flag) {
        flag("numerics", e.to_string());
    }
    found
}

fn checks(
    entry: &CorpusEntry,
    seed: u64,
    tol: &TolerancePolicy,
    flag: &mut impl FnMut(&'static str, String),
) -> Result<(), Error> {
    let a = &entry.matrix;
    let n = a.rows();
    let report = classify(a, tol)?;

    for (p, q) in report.ep_disagreements() {
        flag(
            "ep_equivalence",
            format!(
                "{} (pass={}, residual={:e}) vs {} (pass={}, residual={:e})",
                p.as_str(),
                report.passes(p),
                report.condition(p).residual,
                q.as_str(),
                report.passes(q),
                report.condition(q).residual
            ),
        );
    }
    if report.is_ep != report.is_hypo_ep {
        flag(
            "finite_collapse",
            format!("is_ep={} is_hypo_ep={}", report.is_ep, report.is_hypo_ep),
        );
    }
    let chain = [
        ConditionId::Hypo2DaggerSquare,
        ConditionId::Chain2,
        ConditionId::Chain3,
        ConditionId::Chain4,
    ];
    for w in chain.windows(2) {
        if report.passes(w[0]) && !report.passes(w[1]) {
            flag(
                "hypo_chain",
                format!(
                    "{} holds but {} fails (residual {:e})",
                    w[0].as_str(),
                    w[1].as_str(),
                    report.condition(w[1]).residual
                ),
            );
        }
    }

    let penrose = penrose_verify(a, &pinv(a, tol)?, tol)?;
    if !penrose.pass {
        flag(
            "penrose",
            format!("max residual {:e}", penrose.max_residual()),
        );
    }
    for r in dagger_identities(a, tol)? {
        if r.residual > tol.subspace_tol {
            flag(
                "dagger_identity",
                format!("{} residual {:e}", r.id, r.residual),
            );
        }
    }
    if report.is_ep {
        for c in ep_closure_suite(a, tol)? {
            if !c.is_ep {
                flag("ep_closure", format!("{} is not EP", c.name));
            }
        }
    }

    let mut rng = random::rng(seed ^ (entry.index as u64).wrapping_mul(0x2545_f491));
    let c = random::gaussian_matrix(&mut rng, n, n);
    let bc = a * &c;
    let inclusion = range_inclusion_check(&bc, a, tol)?;
    if !inclusion.holds {
        flag(
            "douglas_inclusion",
            format!("R(BC) not in R(B), residual {:e}", inclusion.residual),
        );
    } else {
        let d = douglas_factorize(&bc, a, tol, seed)?;
        if d.residual_bc_a > tol.subspace_tol * residual_scale(&bc) || !d.bound_k.is_finite() {
            flag(
                "douglas_factorization",
                format!("residual {:e}, k {}", d.residual_bc_a, d.bound_k),
            );
        }
    }
    Ok(())
}
