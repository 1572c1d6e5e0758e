//! Witness searchers.
//!
//! The searcher consumes a full string, scans for the first term it
//! satisfies, binds that term to the next stage of the partial witness, and
//! overwrites the stage's block with its recorded responses before
//! continuing. The coupled form builds the string as `rho ∘ y` from an advice
//! string; the decoupled form consumes the string directly and never needs to
//! know which part was fixed by the restriction.

use thiserror::Error;

use crate::bits::BitString;
use crate::formula::{BooleanFn, DnfFormula};
use crate::restriction::Restriction;

use super::{
    GlobalPartialWitness, GlobalStage, GlobalWitness, PartialWitness, Witness, WitnessError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    /// The searcher's ERROR outcome, tagged with the stage that failed.
    #[error("no term satisfied by the running string at stage {stage}")]
    NoSatisfiedTerm { stage: usize },
    #[error("stage {stage} pattern does not fit term {term}")]
    PatternDoesNotFit { stage: usize, term: usize },
    #[error("global stage {stage}: {inner}")]
    GlobalStage { stage: usize, inner: Box<SearchError> },
    #[error("malformed input: {0}")]
    Malformed(#[from] WitnessError),
    #[error("advice length {advice} does not match dimension {dim}")]
    AdviceLength { advice: usize, dim: usize },
}

/// Runs the searcher on the string `z` directly.
pub fn witness_search_decoupled(
    f: &DnfFormula,
    z: &BitString,
    pw: &PartialWitness,
) -> Result<Witness, SearchError> {
    if z.len() != f.dimension() {
        return Err(SearchError::AdviceLength { advice: z.len(), dim: f.dimension() });
    }
    let mut z = z.clone();
    let mut scan_from = 0usize;
    let mut terms = Vec::with_capacity(pw.stage_count());
    for (c, stage) in pw.stages().iter().enumerate() {
        let found = (scan_from..f.term_count()).find(|&j| f.term(j).eval_and(&z));
        let Some(j) = found else {
            return Err(SearchError::NoSatisfiedTerm { stage: c });
        };
        let lits = f.term(j).literals();
        for (&pos, &b) in stage.positions().iter().zip(stage.responses()) {
            let Some(l) = lits.get(pos) else {
                return Err(SearchError::PatternDoesNotFit { stage: c, term: j });
            };
            z.set(l.var, b);
        }
        terms.push(j);
        scan_from = j + 1;
    }
    Ok(Witness::new(terms, pw.stages().to_vec()).expect("searcher produces increasing terms"))
}

/// Runs the searcher on `rho ∘ y`. Equals the decoupled searcher on the
/// composed string for every input.
pub fn witness_search(
    f: &DnfFormula,
    rho: &Restriction,
    pw: &PartialWitness,
    y: &BitString,
) -> Result<Witness, SearchError> {
    let z = rho
        .complete_with(y)
        .map_err(|_| SearchError::AdviceLength { advice: y.len(), dim: rho.dimension() })?;
    witness_search_decoupled(f, &z, pw)
}

/// Chains the searcher across a global partial witness: each stage searches
/// its formula under the running restriction, then the involved variables are
/// overwritten by the stage's adversarial block.
pub fn global_witness_search(
    family: &[DnfFormula],
    rho: &Restriction,
    gpw: &GlobalPartialWitness,
    y: &BitString,
) -> Result<GlobalWitness, SearchError> {
    let mut chained = rho.clone();
    let mut stages = Vec::with_capacity(gpw.stages.len());
    for (c, gstage) in gpw.stages.iter().enumerate() {
        let f = family.get(gstage.formula).ok_or(SearchError::Malformed(
            WitnessError::FormulaOutOfRange { formula: gstage.formula, len: family.len() },
        ))?;
        let witness = witness_search(f, &chained, &gstage.partial, y)
            .map_err(|inner| SearchError::GlobalStage { stage: c, inner: Box::new(inner) })?;
        let involved = witness.involved_vars(f)?;
        if involved.len() != gstage.beta.len() {
            return Err(SearchError::Malformed(WitnessError::BetaShape {
                block: involved.len(),
                beta: gstage.beta.len(),
            }));
        }
        let mut overlay = Restriction::all_star(chained.dimension());
        for (&v, &b) in involved.iter().zip(&gstage.beta) {
            overlay.assign(v, b);
        }
        chained = chained.compose(&overlay).expect("same dimension");
        stages.push(GlobalStage { formula: gstage.formula, witness, beta: gstage.beta.clone() });
    }
    Ok(GlobalWitness { stages })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{dnf, pattern};
    use super::super::{complete_partial_witness, is_witness, PartialWitness};
    use super::*;

    #[test]
    fn finds_single_term() {
        let f = dnf(3, &[&[(0, false), (1, false)]]);
        let pw = PartialWitness::new(vec![pattern(&[0, 1], &[false, false])]).unwrap();
        let y = BitString::parse_binary("110").unwrap();
        let wit = witness_search(&f, &Restriction::all_star(3), &pw, &y).unwrap();
        assert_eq!(wit.terms(), &[0]);
    }

    #[test]
    fn error_when_nothing_satisfied() {
        let f = dnf(3, &[&[(0, false), (1, false)]]);
        let pw = PartialWitness::new(vec![pattern(&[0, 1], &[false, false])]).unwrap();
        let y = BitString::parse_binary("000").unwrap();
        assert_eq!(
            witness_search(&f, &Restriction::all_star(3), &pw, &y),
            Err(SearchError::NoSatisfiedTerm { stage: 0 })
        );
    }

    #[test]
    fn two_step_decoupled_search() {
        // z satisfies term 0; the overwrite falsifies it, and z then satisfies
        // term 2, skipping term 1.
        let f = dnf(
            4,
            &[&[(0, false), (1, false)], &[(0, false), (2, true)], &[(2, false), (3, false)]],
        );
        let pw = PartialWitness::new(vec![
            pattern(&[0], &[false]),
            pattern(&[0, 1], &[false, false]),
        ])
        .unwrap();
        // z = 1111: term 0 satisfied; overwrite x0 <- 0 kills terms 0 and 1;
        // term 2 satisfied by x2 = x3 = 1.
        let z = BitString::parse_binary("1111").unwrap();
        let wit = witness_search_decoupled(&f, &z, &pw).unwrap();
        assert_eq!(wit.terms(), &[0, 2]);
    }

    #[test]
    fn coupled_equals_decoupled_on_composition() {
        let f = dnf(4, &[&[(0, false), (1, true)], &[(2, false), (3, false)]]);
        let pw = PartialWitness::new(vec![pattern(&[1], &[true])]).unwrap();
        for code in 0..81u32 {
            let mut rho = Restriction::all_star(4);
            let mut c = code;
            for i in 0..4 {
                match c % 3 {
                    0 => {}
                    1 => rho.assign(i, false),
                    _ => rho.assign(i, true),
                }
                c /= 3;
            }
            for v in 0..16u64 {
                let y = BitString::from_u64(4, v);
                let z = rho.complete_with(&y).unwrap();
                assert_eq!(
                    witness_search(&f, &rho, &pw, &y),
                    witness_search_decoupled(&f, &z, &pw)
                );
            }
        }
    }

    #[test]
    fn global_search_with_one_stage_reduces_to_witness_search() {
        use super::super::{GlobalPartialStage, GlobalPartialWitness};
        let f = dnf(4, &[&[(0, false), (1, false)], &[(2, false), (3, true)]]);
        let family = vec![f.clone()];
        let pw = PartialWitness::new(vec![pattern(&[0, 1], &[false, true])]).unwrap();
        let gpw = GlobalPartialWitness {
            stages: vec![GlobalPartialStage {
                formula: 0,
                partial: pw.clone(),
                beta: vec![true, false],
            }],
        };
        let rho = Restriction::all_star(4);
        for v in 0..16u64 {
            let y = BitString::from_u64(4, v);
            let single = witness_search(&f, &rho, &pw, &y);
            let global = global_witness_search(&family, &rho, &gpw, &y);
            match (single, global) {
                (Ok(w), Ok(g)) => {
                    assert_eq!(g.stages.len(), 1);
                    assert_eq!(g.stages[0].witness, w);
                }
                (Err(_), Err(SearchError::GlobalStage { stage: 0, .. })) => {}
                (s, g) => panic!("mismatch: {s:?} vs {g:?}"),
            }
        }
    }

    #[test]
    fn adversarial_block_can_kill_the_next_stage_for_every_advice() {
        use super::super::{GlobalPartialStage, GlobalPartialWitness};
        // Stage 1 commits x0 <- 0; stage 2 needs the term x0 AND x1, which can
        // then never be satisfied, whatever the advice.
        let family = vec![
            dnf(3, &[&[(0, false)]]),
            dnf(3, &[&[(0, false), (1, false)]]),
        ];
        let gpw = GlobalPartialWitness {
            stages: vec![
                GlobalPartialStage {
                    formula: 0,
                    partial: PartialWitness::new(vec![pattern(&[0], &[true])]).unwrap(),
                    beta: vec![false],
                },
                GlobalPartialStage {
                    formula: 1,
                    partial: PartialWitness::new(vec![pattern(&[0, 1], &[false, false])]).unwrap(),
                    beta: vec![false, false],
                },
            ],
        };
        let rho = Restriction::all_star(3);
        for v in 0..8u64 {
            let y = BitString::from_u64(3, v);
            let got = global_witness_search(&family, &rho, &gpw, &y);
            match got {
                Err(SearchError::GlobalStage { stage, .. }) => assert!(stage <= 1),
                other => panic!("expected a stage error, got {other:?}"),
            }
        }
    }

    #[test]
    fn success_count_is_exactly_two_to_n_minus_s() {
        // For a valid partial witness, the searcher finds the unique
        // completion on exactly 2^(n-s) advice strings.
        let f = dnf(
            5,
            &[&[(0, false), (1, false)], &[(1, true), (2, false), (3, false)], &[(4, false)]],
        );
        let rho: Restriction = "*****".parse().unwrap();
        // Build a valid witness by running the canonical tree on all-zero.
        let alpha = BitString::zeros(5);
        let t = crate::canonical::canonical_dt_run(&f, &rho, &mut &alpha).unwrap();
        assert!(t.total_queries() >= 2);
        let pw = {
            let (terms, stages) = {
                let mut terms = Vec::new();
                let mut stages = Vec::new();
                for step in &t.steps {
                    let lits = f.term(step.term).literals();
                    terms.push(step.term);
                    stages.push(
                        super::super::StagePattern::new(
                            step.vars
                                .iter()
                                .map(|&v| lits.iter().position(|l| l.var == v).unwrap())
                                .collect(),
                            step.responses.clone(),
                        )
                        .unwrap(),
                    );
                }
                (terms, stages)
            };
            let wit = super::super::Witness::new(terms, stages).unwrap();
            assert!(is_witness(&f, &rho, &wit).unwrap());
            wit.to_partial()
        };
        let expected = complete_partial_witness(&f, &rho, &pw).unwrap().unwrap();
        let s = pw.size();
        let mut successes = 0u64;
        for v in 0..32u64 {
            let y = BitString::from_u64(5, v);
            if witness_search(&f, &rho, &pw, &y) == Ok(expected.clone()) {
                successes += 1;
            }
        }
        assert_eq!(successes, 1 << (5 - s));
    }
}
