//! CNF testers for witnesses.
//!
//! For a fixed star set Λ and witness, the tester `h(x)` decides whether the
//! witness replays against the restriction that stars Λ and fixes everything
//! else to `x`. All conditions that depend only on Λ, on the recorded
//! responses, or on previously committed blocks are resolved at build time;
//! what remains is, per scanned term, either one OR clause over its variables
//! outside Λ (the term must be falsified by `x`) or unit clauses (the stage
//! term must stay consistent with `x`). The result is a CNF whose clause
//! gadgets map one-to-one onto scanned terms.

use thiserror::Error;

use crate::bits::VarSet;
use crate::formula::{BooleanFn, CnfFormula, DnfFormula, Literal, Term};
use crate::restriction::{Cell, Restriction};

use super::{GlobalWitness, Witness, WitnessError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessCnfError {
    /// Witness blocks must lie inside the star set.
    #[error("stage {stage} queries variable {var} outside the star set")]
    BlockOutsideLambda { stage: usize, var: usize },
    #[error("star set universe {set} does not match dimension {dim}")]
    UniverseMismatch { set: usize, dim: usize },
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

/// Builds the tester for a single witness. `h(x) = 1` iff `wit` is a witness
/// for the restriction `Λ[x, *]`, and `h` never has more wires than the
/// clause gadgets of the scanned terms admit.
pub fn build_witness_cnf(
    f: &DnfFormula,
    lambda: &VarSet,
    wit: &Witness,
) -> Result<CnfFormula, WitnessCnfError> {
    if lambda.universe() != f.dimension() {
        return Err(WitnessCnfError::UniverseMismatch {
            set: lambda.universe(),
            dim: f.dimension(),
        });
    }
    let mut committed = Restriction::all_star(f.dimension());
    let mut clauses = Vec::new();
    if witness_clauses(f, lambda, &mut committed, wit, 0, &mut clauses)? {
        Ok(CnfFormula::new(f.dimension(), clauses).expect("vars checked"))
    } else {
        Ok(CnfFormula::constant(f.dimension(), false))
    }
}

/// Builds the tester for a global witness: the conjunction of the per-stage
/// testers, each evaluated against the restriction chained through the
/// preceding adversarial blocks.
pub fn build_global_witness_cnf(
    family: &[DnfFormula],
    lambda: &VarSet,
    gw: &GlobalWitness,
) -> Result<CnfFormula, WitnessCnfError> {
    let n = family.first().map_or(lambda.universe(), |f| f.dimension());
    if lambda.universe() != n {
        return Err(WitnessCnfError::UniverseMismatch { set: lambda.universe(), dim: n });
    }
    let mut committed = Restriction::all_star(n);
    let mut clauses = Vec::new();
    for (c, stage) in gw.stages.iter().enumerate() {
        let f = family.get(stage.formula).ok_or(WitnessError::FormulaOutOfRange {
            formula: stage.formula,
            len: family.len(),
        })?;
        let mut local = committed.clone();
        if !witness_clauses(f, lambda, &mut local, &stage.witness, c, &mut clauses)? {
            return Ok(CnfFormula::constant(n, false));
        }
        let involved = stage.witness.involved_vars(f)?;
        if involved.len() != stage.beta.len() {
            return Err(WitnessError::BetaShape {
                block: involved.len(),
                beta: stage.beta.len(),
            }
            .into());
        }
        for (&v, &b) in involved.iter().zip(&stage.beta) {
            committed.assign(v, b);
        }
    }
    Ok(CnfFormula::new(n, clauses).expect("vars checked"))
}

/// Appends the clauses verifying `wit` against `Λ[x, *] ∘ committed`. Returns
/// false when the conditions are unsatisfiable for every `x`, in which case
/// the caller must emit a constant-0 CNF. `committed` holds values only on
/// variables in Λ and is advanced by the witness's responses.
fn witness_clauses(
    f: &DnfFormula,
    lambda: &VarSet,
    committed: &mut Restriction,
    wit: &Witness,
    global_stage: usize,
    clauses: &mut Vec<Term>,
) -> Result<bool, WitnessCnfError> {
    let r = wit.stage_count();
    let mut scan_from = 0usize;
    for (c, (&ell, stage)) in wit.terms().iter().zip(wit.stages()).enumerate() {
        let abs = wit.absolute_vars(f)?[c].clone();
        for (&v, _) in abs.iter().zip(stage.responses()) {
            if !lambda.contains(v) {
                return Err(WitnessCnfError::BlockOutsideLambda { stage: global_stage, var: v });
            }
        }
        // Terms skipped before the stage term must be falsified by x.
        for j in scan_from..ell {
            match falsification_clause(f.term(j), lambda, committed) {
                Falsification::AlreadyFalsified => {}
                Falsification::Clause(clause) => clauses.push(clause),
                Falsification::NeverFalsified => return Ok(false),
            }
        }
        // The stage term must be consistent: its committed literals at build
        // time, its free variables outside Λ via unit clauses, and its
        // unknowns must be exactly the recorded block.
        let term = f.term(ell);
        let mut unknown = Vec::new();
        for l in term.literals() {
            match committed.get(l.var) {
                Cell::Zero | Cell::One => {
                    if !l.satisfied_by(matches!(committed.get(l.var), Cell::One)) {
                        return Ok(false);
                    }
                }
                Cell::Star => {
                    if lambda.contains(l.var) {
                        unknown.push(l.var);
                    } else {
                        clauses.push(Term::new(vec![*l]).expect("single literal"));
                    }
                }
            }
        }
        if unknown != abs {
            return Ok(false);
        }
        for (&v, &b) in abs.iter().zip(stage.responses()) {
            committed.assign(v, b);
        }
        if c + 1 < r {
            // The responses must falsify the stage term, else the scan stops.
            let all_match = abs.iter().zip(stage.responses()).all(|(&v, &b)| {
                term.literals().iter().find(|l| l.var == v).is_some_and(|l| l.satisfied_by(b))
            });
            if all_match {
                return Ok(false);
            }
        }
        scan_from = ell + 1;
    }
    Ok(true)
}

enum Falsification {
    AlreadyFalsified,
    Clause(Term),
    NeverFalsified,
}

/// How term `t` can be falsified by `Λ[x, *] ∘ committed`: a committed
/// literal may already contradict it; otherwise only variables outside Λ can,
/// via an OR over their complemented literals.
fn falsification_clause(t: &Term, lambda: &VarSet, committed: &Restriction) -> Falsification {
    let mut outside = Vec::new();
    for l in t.literals() {
        match committed.get(l.var) {
            Cell::Zero | Cell::One => {
                if !l.satisfied_by(matches!(committed.get(l.var), Cell::One)) {
                    return Falsification::AlreadyFalsified;
                }
            }
            Cell::Star => {
                if !lambda.contains(l.var) {
                    outside.push(Literal { var: l.var, negated: !l.negated });
                }
            }
        }
    }
    if outside.is_empty() {
        Falsification::NeverFalsified
    } else {
        Falsification::Clause(Term::new(outside).expect("distinct vars"))
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{dnf, pattern};
    use super::super::{is_witness, Witness};
    use super::*;
    use crate::bits::BitString;
    use crate::formula::BooleanFn;

    fn check_agreement(f: &DnfFormula, lambda: &VarSet, wit: &Witness) {
        let h = build_witness_cnf(f, lambda, wit).unwrap();
        let n = f.dimension();
        for v in 0..(1u64 << n) {
            let x = BitString::from_u64(n, v);
            let rho = Restriction::fix_outside(lambda, &x).unwrap();
            assert_eq!(
                h.eval(&x),
                is_witness(f, &rho, wit).unwrap(),
                "x = {x}, lambda = {lambda:?}"
            );
        }
    }

    #[test]
    fn full_lambda_tester_is_constant_one() {
        let f = dnf(2, &[&[(0, false), (1, false)]]);
        let lambda = VarSet::full(2);
        let wit = Witness::new(vec![0], vec![pattern(&[0, 1], &[false, false])]).unwrap();
        let h = build_witness_cnf(&f, &lambda, &wit).unwrap();
        assert_eq!(h.as_constant(), Some(true));
        check_agreement(&f, &lambda, &wit);
    }

    #[test]
    fn earlier_term_contributes_one_or_clause() {
        // Term 0 shares no variable with Λ and is not touched by responses:
        // it contributes exactly one OR clause over its complemented literals.
        let f = dnf(4, &[&[(0, false), (1, true)], &[(2, false), (3, false)]]);
        let lambda = VarSet::from_indices(4, [2, 3]).unwrap();
        let wit = Witness::new(vec![1], vec![pattern(&[0, 1], &[true, false])]).unwrap();
        let h = build_witness_cnf(&f, &lambda, &wit).unwrap();
        let or_clauses: Vec<_> = h.clauses().iter().filter(|c| c.len() == 2).collect();
        assert_eq!(or_clauses.len(), 1);
        assert_eq!(
            or_clauses[0].literals(),
            &[Literal::neg(0), Literal::pos(1)]
        );
        check_agreement(&f, &lambda, &wit);
    }

    #[test]
    fn block_outside_lambda_rejected() {
        let f = dnf(2, &[&[(0, false), (1, false)]]);
        let lambda = VarSet::from_indices(2, [0]).unwrap();
        let wit = Witness::new(vec![0], vec![pattern(&[0, 1], &[false, false])]).unwrap();
        assert_eq!(
            build_witness_cnf(&f, &lambda, &wit),
            Err(WitnessCnfError::BlockOutsideLambda { stage: 0, var: 1 })
        );
    }

    #[test]
    fn wire_count_within_formula_for_width_three() {
        let f = dnf(
            6,
            &[
                &[(0, false), (1, false), (2, true)],
                &[(1, true), (3, false)],
                &[(2, false), (4, false), (5, false)],
            ],
        );
        let lambda = VarSet::from_indices(6, [1, 2, 4]).unwrap();
        // Stage term 2 has unknowns {2, 4} in Λ and x5 outside (one unit);
        // terms 0 and 1 contribute one OR clause each over x0 and x3.
        let wit = Witness::new(vec![2], vec![pattern(&[0, 1], &[true, true])]).unwrap();
        let h = build_witness_cnf(&f, &lambda, &wit).unwrap();
        assert_eq!(h.clause_count(), 3);
        assert!(h.size_wires() <= f.size_wires(), "{} > {}", h.size_wires(), f.size_wires());
        check_agreement(&f, &lambda, &wit);
    }

    #[test]
    fn intermediate_satisfying_responses_force_constant_zero() {
        let f = dnf(4, &[&[(0, false), (1, false)], &[(2, false), (3, false)]]);
        let lambda = VarSet::full(4);
        let wit = Witness::new(
            vec![0, 1],
            vec![pattern(&[0, 1], &[true, true]), pattern(&[0, 1], &[false, false])],
        )
        .unwrap();
        let h = build_witness_cnf(&f, &lambda, &wit).unwrap();
        assert_eq!(h.as_constant(), Some(false));
        check_agreement(&f, &lambda, &wit);
    }

    #[test]
    fn wire_bound_can_fail_at_width_five() {
        // Known limit of the wire-count claim: a single 5-AND whose star set
        // covers only the queried variable leaves four unit clauses (8 wires)
        // against the formula's 6. Agreement still holds; only the wire
        // inequality is width-dependent (it always holds for width <= 3).
        let f = dnf(5, &[&[(0, false), (1, false), (2, false), (3, false), (4, false)]]);
        let lambda = VarSet::from_indices(5, [0]).unwrap();
        let wit = Witness::new(vec![0], vec![pattern(&[0], &[false])]).unwrap();
        let h = build_witness_cnf(&f, &lambda, &wit).unwrap();
        assert_eq!(h.size_wires(), 8);
        assert_eq!(f.size_wires(), 6);
        check_agreement(&f, &lambda, &wit);
    }

    #[test]
    fn global_single_stage_matches_plain_tester() {
        let f = dnf(3, &[&[(0, false), (1, false)], &[(2, false)]]);
        let family = vec![f.clone()];
        let lambda = VarSet::full(3);
        let wit = Witness::new(vec![0], vec![pattern(&[0, 1], &[false, true])]).unwrap();
        let gw = GlobalWitness {
            stages: vec![super::super::GlobalStage {
                formula: 0,
                witness: wit.clone(),
                beta: vec![true, false],
            }],
        };
        let h1 = build_witness_cnf(&f, &lambda, &wit).unwrap();
        let hg = build_global_witness_cnf(&family, &lambda, &gw).unwrap();
        assert_eq!(h1, hg);
    }
}
