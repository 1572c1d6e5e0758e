//! The canonical decision tree procedure for DNFs.
//!
//! Starting from the accumulated partial assignment `rho`, terms are scanned
//! first to last; terms falsified by the accumulated assignment are skipped;
//! at the first remaining term all unknown variables are queried at once (in
//! ascending index order), the responses are written into the assignment, and
//! the scan either returns 1 (term satisfied) or moves on. When the scan runs
//! out of terms the output is 0. A term already satisfied by the accumulated
//! assignment decides the output without contributing a query block, so every
//! recorded block is nonempty.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::formula::{BooleanFn, DnfFormula, TermStatus};
use crate::restriction::Restriction;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CanonicalError {
    #[error("query oracle gave no response for variable {var}")]
    OracleFailed { var: usize },
    #[error("dimension mismatch: formula has {formula}, restriction has {restriction}")]
    DimensionMismatch { formula: usize, restriction: usize },
    #[error("restriction has {stars} stars, exceeding the exhaustive cap {cap}")]
    StarCapExceeded { stars: usize, cap: usize },
}

/// Answers queries of the canonical procedure one variable at a time.
pub trait ResponseOracle {
    fn respond(&mut self, var: usize) -> Option<bool>;
}

impl ResponseOracle for &BitString {
    fn respond(&mut self, var: usize) -> Option<bool> {
        (var < self.len()).then(|| self.get(var))
    }
}

/// Adapts a closure into a [`ResponseOracle`].
pub struct FnOracle<F>(pub F);

impl<F: FnMut(usize) -> Option<bool>> ResponseOracle for FnOracle<F> {
    fn respond(&mut self, var: usize) -> Option<bool> {
        (self.0)(var)
    }
}

/// One query block: the term that triggered it, the queried variables in
/// ascending order, and the responses received.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptStep {
    pub term: usize,
    pub vars: Vec<usize>,
    pub responses: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunOutcome {
    /// The procedure returned this output bit.
    Decided(bool),
    /// A query limit stopped the run before it decided.
    BudgetExhausted,
}

/// The run record of the canonical procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalTranscript {
    pub steps: Vec<TranscriptStep>,
    pub outcome: RunOutcome,
}

impl CanonicalTranscript {
    pub fn total_queries(&self) -> usize {
        self.steps.iter().map(|s| s.vars.len()).sum()
    }

    /// Term indices strictly increase, blocks are nonempty and pairwise
    /// disjoint.
    pub fn check_invariants(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        let mut last_term = None;
        for step in &self.steps {
            if step.vars.is_empty() || step.vars.len() != step.responses.len() {
                return false;
            }
            if last_term.is_some_and(|t| step.term <= t) {
                return false;
            }
            last_term = Some(step.term);
            for &v in &step.vars {
                if !seen.insert(v) {
                    return false;
                }
            }
        }
        true
    }
}

fn run_inner(
    f: &DnfFormula,
    rho: &Restriction,
    oracle: &mut dyn ResponseOracle,
    limit: Option<usize>,
) -> Result<CanonicalTranscript, CanonicalError> {
    if f.dimension() != rho.dimension() {
        return Err(CanonicalError::DimensionMismatch {
            formula: f.dimension(),
            restriction: rho.dimension(),
        });
    }
    let mut x = rho.clone();
    let mut steps = Vec::new();
    let mut total = 0usize;
    let mut scan_from = 0usize;
    loop {
        let mut hit = None;
        for j in scan_from..f.term_count() {
            match f.term(j).status_under(&x) {
                TermStatus::Falsified => continue,
                status => {
                    hit = Some((j, status));
                    break;
                }
            }
        }
        let Some((j, status)) = hit else {
            return Ok(CanonicalTranscript { steps, outcome: RunOutcome::Decided(false) });
        };
        match status {
            TermStatus::Satisfied => {
                return Ok(CanonicalTranscript { steps, outcome: RunOutcome::Decided(true) });
            }
            TermStatus::Live { unknown } => {
                let mut responses = Vec::with_capacity(unknown.len());
                for &v in &unknown {
                    let bit = oracle.respond(v).ok_or(CanonicalError::OracleFailed { var: v })?;
                    x.assign(v, bit);
                    responses.push(bit);
                }
                total += unknown.len();
                steps.push(TranscriptStep { term: j, vars: unknown, responses });
                if matches!(f.term(j).status_under(&x), TermStatus::Satisfied) {
                    return Ok(CanonicalTranscript { steps, outcome: RunOutcome::Decided(true) });
                }
                if limit.is_some_and(|l| total >= l) {
                    return Ok(CanonicalTranscript { steps, outcome: RunOutcome::BudgetExhausted });
                }
                scan_from = j + 1;
            }
            TermStatus::Falsified => unreachable!(),
        }
    }
}

/// Runs the canonical procedure on `f` restricted by `rho`, answering queries
/// from `oracle`.
pub fn canonical_dt_run(
    f: &DnfFormula,
    rho: &Restriction,
    oracle: &mut dyn ResponseOracle,
) -> Result<CanonicalTranscript, CanonicalError> {
    run_inner(f, rho, oracle, None)
}

/// As [`canonical_dt_run`], but stops once at least `limit` queries were made.
pub fn canonical_dt_run_limited(
    f: &DnfFormula,
    rho: &Restriction,
    oracle: &mut dyn ResponseOracle,
    limit: usize,
) -> Result<CanonicalTranscript, CanonicalError> {
    run_inner(f, rho, oracle, Some(limit))
}

/// Depth of the canonical decision tree of `f|rho`: the maximum number of
/// queries over all response strings, computed by walking the tree of
/// response branches. Requires `rho.star_count() <= cap`.
pub fn cdt_depth(f: &DnfFormula, rho: &Restriction, cap: usize) -> Result<usize, CanonicalError> {
    if f.dimension() != rho.dimension() {
        return Err(CanonicalError::DimensionMismatch {
            formula: f.dimension(),
            restriction: rho.dimension(),
        });
    }
    let stars = rho.star_count();
    if stars > cap {
        return Err(CanonicalError::StarCapExceeded { stars, cap });
    }
    Ok(walk(f, rho, 0, 0))
}

fn walk(f: &DnfFormula, x: &Restriction, scan_from: usize, acc: usize) -> usize {
    let mut hit = None;
    for j in scan_from..f.term_count() {
        match f.term(j).status_under(x) {
            TermStatus::Falsified => continue,
            status => {
                hit = Some((j, status));
                break;
            }
        }
    }
    let Some((j, status)) = hit else { return acc };
    let TermStatus::Live { unknown } = status else { return acc };
    let branches = 1u64 << unknown.len();
    let eval_branch = |resp: u64| -> usize {
        let mut next = x.clone();
        for (pos, &v) in unknown.iter().enumerate() {
            next.assign(v, (resp >> pos) & 1 == 1);
        }
        if matches!(f.term(j).status_under(&next), TermStatus::Satisfied) {
            acc + unknown.len()
        } else {
            walk(f, &next, j + 1, acc + unknown.len())
        }
    };
    #[cfg(feature = "parallel")]
    {
        // Only fan out at the root of the walk; the subtrees below are
        // sequential.
        if acc == 0 && branches >= 4 {
            use rayon::prelude::*;
            return (0..branches).into_par_iter().map(eval_branch).max().unwrap_or(acc);
        }
    }
    (0..branches).map(eval_branch).max().unwrap_or(acc)
}

/// Sequential variant of [`cdt_depth`] regardless of enabled features; used
/// for benchmarking the parallel speedup.
pub fn cdt_depth_seq(
    f: &DnfFormula,
    rho: &Restriction,
    cap: usize,
) -> Result<usize, CanonicalError> {
    if f.dimension() != rho.dimension() {
        return Err(CanonicalError::DimensionMismatch {
            formula: f.dimension(),
            restriction: rho.dimension(),
        });
    }
    let stars = rho.star_count();
    if stars > cap {
        return Err(CanonicalError::StarCapExceeded { stars, cap });
    }
    Ok(walk_seq(f, rho, 0, 0))
}

fn walk_seq(f: &DnfFormula, x: &Restriction, scan_from: usize, acc: usize) -> usize {
    let mut hit = None;
    for j in scan_from..f.term_count() {
        match f.term(j).status_under(x) {
            TermStatus::Falsified => continue,
            status => {
                hit = Some((j, status));
                break;
            }
        }
    }
    let Some((j, status)) = hit else { return acc };
    let TermStatus::Live { unknown } = status else { return acc };
    (0..1u64 << unknown.len())
        .map(|resp| {
            let mut next = x.clone();
            for (pos, &v) in unknown.iter().enumerate() {
                next.assign(v, (resp >> pos) & 1 == 1);
            }
            if matches!(f.term(j).status_under(&next), TermStatus::Satisfied) {
                acc + unknown.len()
            } else {
                walk_seq(f, &next, j + 1, acc + unknown.len())
            }
        })
        .max()
        .unwrap_or(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Literal, Term};

    fn dnf(n: usize, terms: &[&[(usize, bool)]]) -> DnfFormula {
        let terms = terms
            .iter()
            .map(|lits| {
                Term::new(lits.iter().map(|&(v, neg)| Literal { var: v, negated: neg }).collect())
                    .unwrap()
            })
            .collect();
        DnfFormula::new(n, terms).unwrap()
    }

    fn bits(s: &str) -> BitString {
        BitString::parse_binary(s).unwrap()
    }

    #[test]
    fn first_term_satisfied() {
        let f = dnf(2, &[&[(0, false), (1, false)]]);
        let alpha = bits("11");
        let t = canonical_dt_run(&f, &Restriction::all_star(2), &mut &alpha).unwrap();
        assert_eq!(t.outcome, RunOutcome::Decided(true));
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0], TranscriptStep { term: 0, vars: vec![0, 1], responses: vec![true, true] });
    }

    #[test]
    fn two_blocks_all_zero() {
        let f = dnf(4, &[&[(0, false), (1, false)], &[(2, false), (3, false)]]);
        let alpha = bits("0000");
        let t = canonical_dt_run(&f, &Restriction::all_star(4), &mut &alpha).unwrap();
        assert_eq!(t.outcome, RunOutcome::Decided(false));
        assert_eq!(t.steps.len(), 2);
        assert_eq!(t.total_queries(), 4);
        assert!(t.check_invariants());
    }

    #[test]
    fn dead_term_under_restriction() {
        let f = dnf(2, &[&[(0, false), (1, false)]]);
        let rho: Restriction = "0*".parse().unwrap();
        let alpha = bits("11");
        let t = canonical_dt_run(&f, &rho, &mut &alpha).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.outcome, RunOutcome::Decided(false));
    }

    #[test]
    fn satisfied_term_decides_without_a_block() {
        // Term 1 is fixed true by rho; term 0 stays live and is queried first.
        let f = dnf(3, &[&[(0, false)], &[(1, false), (2, false)]]);
        let rho: Restriction = "*11".parse().unwrap();
        let alpha = bits("000");
        let t = canonical_dt_run(&f, &rho, &mut &alpha).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].term, 0);
        assert_eq!(t.outcome, RunOutcome::Decided(true));
    }

    #[test]
    fn output_matches_eval_on_completion() {
        let f = dnf(5, &[&[(0, false), (2, true)], &[(1, false), (3, false)], &[(4, true)]]);
        let rho: Restriction = "*0***".parse().unwrap();
        for v in 0..32u64 {
            let alpha = BitString::from_u64(5, v);
            let t = canonical_dt_run(&f, &rho, &mut &alpha).unwrap();
            let completed = rho.complete_with(&alpha).unwrap();
            assert_eq!(t.outcome, RunOutcome::Decided(f.eval(&completed)));
        }
    }

    #[test]
    fn cdt_depth_examples() {
        let cap = 16;
        assert_eq!(cdt_depth(&DnfFormula::constant(3, true), &Restriction::all_star(3), cap).unwrap(), 0);
        let f = dnf(2, &[&[(0, false), (1, false)]]);
        assert_eq!(cdt_depth(&f, &Restriction::all_star(2), cap).unwrap(), 2);
        // An OR of two disjoint pairs costs 4 on the all-zero oracle.
        let g = dnf(4, &[&[(0, false), (1, false)], &[(2, false), (3, false)]]);
        assert_eq!(cdt_depth(&g, &Restriction::all_star(4), cap).unwrap(), 4);
        assert_eq!(cdt_depth_seq(&g, &Restriction::all_star(4), cap).unwrap(), 4);
    }

    #[test]
    fn cdt_star_cap() {
        let f = dnf(3, &[&[(0, false), (1, false), (2, false)]]);
        assert_eq!(
            cdt_depth(&f, &Restriction::all_star(3), 2),
            Err(CanonicalError::StarCapExceeded { stars: 3, cap: 2 })
        );
    }

    #[test]
    fn budget_limited_run() {
        let f = dnf(6, &[&[(0, false), (1, false)], &[(2, false), (3, false)], &[(4, false), (5, false)]]);
        let alpha = bits("000000");
        let t = canonical_dt_run_limited(&f, &Restriction::all_star(6), &mut &alpha, 3).unwrap();
        assert_eq!(t.outcome, RunOutcome::BudgetExhausted);
        assert_eq!(t.total_queries(), 4);
        assert_eq!(t.steps.len(), 2);
    }

    #[test]
    fn transcript_serializes_to_a_json_line() {
        let f = dnf(2, &[&[(0, false), (1, false)]]);
        let alpha = bits("10");
        let t = canonical_dt_run(&f, &Restriction::all_star(2), &mut &alpha).unwrap();
        let line = serde_json::to_string(&t).unwrap();
        assert!(!line.contains('\n'));
        assert_eq!(serde_json::from_str::<CanonicalTranscript>(&line).unwrap(), t);
        assert_eq!(
            line,
            r#"{"steps":[{"term":0,"vars":[0,1],"responses":[true,false]}],"outcome":{"Decided":false}}"#
        );
    }

    #[test]
    fn oracle_failure_reported() {
        let f = dnf(2, &[&[(0, false), (1, false)]]);
        let mut oracle = FnOracle(|v: usize| (v == 0).then_some(true));
        let err = canonical_dt_run(&f, &Restriction::all_star(2), &mut oracle).unwrap_err();
        assert_eq!(err, CanonicalError::OracleFailed { var: 1 });
    }
}
