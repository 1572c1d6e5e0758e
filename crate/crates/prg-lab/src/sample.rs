//! Random instances: formulas, restrictions, witness instances.

use prg_core::{
    canonical_dt_run_limited, canonical_partial_dt_run, is_global_witness, is_witness,
    DnfFormula, DtOracle, FnBlockOracle, GlobalStage, GlobalWitness, Literal, Restriction,
    RunOutcome, StagePattern, Term, VarSet, Witness,
};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::stream::random_bits;

/// A width-exactly-`k` DNF with `m` terms over `n` variables. Term order is
/// the generation order; duplicates are kept.
pub fn random_kdnf(rng: &mut impl Rng, n: usize, m: usize, k: usize) -> DnfFormula {
    assert!(k <= n);
    let mut vars: Vec<usize> = (0..n).collect();
    let terms = (0..m)
        .map(|_| {
            vars.shuffle(rng);
            let lits = vars[..k]
                .iter()
                .map(|&v| Literal { var: v, negated: rng.random::<bool>() })
                .collect();
            Term::new(lits).expect("distinct variables")
        })
        .collect();
    DnfFormula::new(n, terms).expect("vars in range")
}

pub fn random_family(
    rng: &mut impl Rng,
    n: usize,
    formulas: usize,
    m: usize,
    k: usize,
) -> Vec<DnfFormula> {
    (0..formulas).map(|_| random_kdnf(rng, n, m, k)).collect()
}

/// Independent per-coordinate star set: each index kept with probability `p`.
pub fn truly_random_subset(rng: &mut impl Rng, n: usize, p: f64) -> VarSet {
    VarSet::from_indices(n, (0..n).filter(|_| rng.random_bool(p))).expect("in range")
}

/// A restriction whose star set has per-coordinate density `star_p` and whose
/// fixed coordinates are uniform.
pub fn random_restriction(rng: &mut impl Rng, n: usize, star_p: f64) -> Restriction {
    let lambda = truly_random_subset(rng, n, star_p);
    let x = random_bits(rng, n);
    Restriction::fix_outside(&lambda, &x).expect("same dimension")
}

/// A formula, restriction and valid witness extracted from a canonical run.
#[derive(Debug, Clone)]
pub struct WitnessInstance {
    pub formula: DnfFormula,
    pub rho: Restriction,
    pub witness: Witness,
    pub t: usize,
}

/// One attempt at generating a valid witness instance with at least `t` total
/// queries; the canonical run is truncated once the budget is reached, so the
/// witness size lands in `[t, t + k - 1]`.
pub fn random_witness_instance(
    rng: &mut impl Rng,
    n: usize,
    m: usize,
    k: usize,
    t: usize,
    star_p: f64,
) -> Option<WitnessInstance> {
    let formula = random_kdnf(rng, n, m, k);
    let rho = random_restriction(rng, n, star_p);
    let alpha = random_bits(rng, n);
    let run = canonical_dt_run_limited(&formula, &rho, &mut &alpha, t).ok()?;
    let enough = match run.outcome {
        RunOutcome::BudgetExhausted => true,
        RunOutcome::Decided(_) => run.total_queries() >= t,
    };
    if !enough {
        return None;
    }
    let witness = transcript_witness(&formula, &run.steps)?;
    debug_assert!(witness.is_structurally_valid(t, k));
    debug_assert!(matches!(is_witness(&formula, &rho, &witness), Ok(true)));
    Some(WitnessInstance { formula, rho, witness, t })
}

fn transcript_witness(
    f: &DnfFormula,
    steps: &[prg_core::TranscriptStep],
) -> Option<Witness> {
    if steps.is_empty() {
        return None;
    }
    let mut terms = Vec::with_capacity(steps.len());
    let mut stages = Vec::with_capacity(steps.len());
    for step in steps {
        let lits = f.term(step.term).literals();
        let positions: Vec<usize> =
            step.vars.iter().map(|&v| lits.iter().position(|l| l.var == v).unwrap()).collect();
        terms.push(step.term);
        stages.push(StagePattern::new(positions, step.responses.clone()).ok()?);
    }
    Witness::new(terms, stages).ok()
}

/// A family, restriction and valid global witness extracted from a canonical
/// partial run with random consultations and adversarial answers.
#[derive(Debug, Clone)]
pub struct GlobalInstance {
    pub family: Vec<DnfFormula>,
    pub rho: Restriction,
    pub witness: GlobalWitness,
    pub w: usize,
    pub t: usize,
}

/// One attempt at a valid global witness instance. The run must commit at
/// least one block, stop within the structural size window and use at most
/// `t / w` stages; attempts violating any of these are discarded.
pub fn random_global_instance(
    rng: &mut impl Rng,
    n: usize,
    formulas: usize,
    m: usize,
    k: usize,
    w: usize,
    t: usize,
    star_p: f64,
) -> Option<GlobalInstance> {
    let family = random_family(rng, n, formulas, m, k);
    let rho = random_restriction(rng, n, star_p);
    let z = random_bits(rng, n);
    let beta_bits = random_bits(rng, n);
    let mut beta = FnBlockOracle(|vars: &[usize]| {
        Some(vars.iter().map(|&v| beta_bits.get(v)).collect::<Vec<bool>>())
    });
    let mut dt = DtOracle::default();
    let run = canonical_partial_dt_run(&family, &rho, &z, &mut beta, w, t, &mut dt).ok()?;
    if run.stages.is_empty() || !run.reached(t) {
        return None;
    }
    if run.stages.len() > t / w {
        return None;
    }
    let mut stages = Vec::with_capacity(run.stages.len());
    for stage in &run.stages {
        let witness = transcript_witness(&family[stage.formula], &stage.inner)?;
        stages.push(GlobalStage {
            formula: stage.formula,
            witness,
            beta: stage.beta.clone(),
        });
    }
    let witness = GlobalWitness { stages };
    if !matches!(is_global_witness(&family, &rho, &witness, w, t), Ok(true)) {
        return None;
    }
    Some(GlobalInstance { family, rho, witness, w, t })
}

/// Retries a generator until it yields, up to `attempts`.
pub fn retry<T>(attempts: usize, mut f: impl FnMut() -> Option<T>) -> Option<T> {
    (0..attempts).find_map(|_| f())
}
