//! Common partial decision trees for families of DNFs.
//!
//! A `w`-partial depth-`t` decision tree for a family is a depth-`t` common
//! query tree after which every formula in the family has decision-tree
//! depth at most `w`. [`FamilyDtOracle`] decides existence exhaustively by
//! computing, for each reachable restriction, the minimal common-tree depth
//! that settles the whole family, and can emit an explicit certificate. The
//! module also contains the canonical partial decision tree procedure, which
//! consults an auxiliary string for tentative answers and commits whole query
//! blocks from an adversarial input.

use std::collections::HashMap;

use thiserror::Error;

use crate::bits::BitString;
use crate::canonical::TranscriptStep;
use crate::formula::{BooleanFn, DnfFormula, TermStatus};
use crate::restriction::Restriction;
use crate::tree::DecisionTree;
use crate::truth::{DtError, DtOracle, TruthTable};

/// Default cap on the ambient dimension for the exhaustive family oracle.
pub const DEFAULT_FAMILY_DIM_CAP: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartialDtError {
    #[error("family dimension {dim} exceeds the exhaustive-search cap {cap}")]
    DimCapExceeded { dim: usize, cap: usize },
    #[error("family formulas disagree on the ambient dimension")]
    MixedDimensions,
    #[error("common-tree budget {t} exceeds the dimension {n}")]
    BudgetOverDimension { t: usize, n: usize },
    #[error(transparent)]
    Dt(#[from] DtError),
    #[error("block oracle gave no response for {0:?}")]
    OracleFailed(Vec<usize>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("common tree has depth {depth}, over the budget {t}")]
    CommonTooDeep { depth: usize, t: usize },
    #[error("common tree queries variable {var} that is already fixed")]
    QueryOnFixed { var: usize },
    #[error("completion tree for formula {formula} has depth {depth}, over the width {w}")]
    CompletionTooDeep { formula: usize, depth: usize, w: usize },
    #[error("completion tree for formula {formula} disagrees with the formula at a leaf")]
    CompletionWrong { formula: usize },
    #[error("leaf holds {got} completion trees for a family of {expected}")]
    CompletionCount { got: usize, expected: usize },
}

/// Answers block queries of the canonical partial decision tree.
pub trait BlockOracle {
    fn respond_block(&mut self, vars: &[usize]) -> Option<Vec<bool>>;
}

impl BlockOracle for &BitString {
    fn respond_block(&mut self, vars: &[usize]) -> Option<Vec<bool>> {
        vars.iter().map(|&v| (v < self.len()).then(|| self.get(v))).collect()
    }
}

/// Adapts a closure into a [`BlockOracle`].
pub struct FnBlockOracle<F>(pub F);

impl<F: FnMut(&[usize]) -> Option<Vec<bool>>> BlockOracle for FnBlockOracle<F> {
    fn respond_block(&mut self, vars: &[usize]) -> Option<Vec<bool>> {
        (self.0)(vars)
    }
}

/// The common tree of a partial decision tree certificate; each leaf carries
/// one completion tree per formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommonTree {
    Leaf { completions: Vec<DecisionTree> },
    Query { var: usize, zero: Box<CommonTree>, one: Box<CommonTree> },
}

impl CommonTree {
    pub fn depth(&self) -> usize {
        match self {
            CommonTree::Leaf { .. } => 0,
            CommonTree::Query { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }
}

/// An explicit `w`-partial depth-`t` decision tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDtCertificate {
    pub tree: CommonTree,
}

impl PartialDtCertificate {
    pub fn common_depth(&self) -> usize {
        self.tree.depth()
    }

    /// Checks every stated property: common depth within `t`, queries only on
    /// stars, and at every leaf each completion tree has depth at most `w`
    /// and computes the restricted formula (checked over every completion of
    /// the remaining stars).
    pub fn validate(
        &self,
        family: &[DnfFormula],
        rho: &Restriction,
        w: usize,
        t: usize,
    ) -> Result<(), CertificateError> {
        let depth = self.common_depth();
        if depth > t {
            return Err(CertificateError::CommonTooDeep { depth, t });
        }
        validate_node(&self.tree, family, rho.clone(), w)
    }
}

fn validate_node(
    node: &CommonTree,
    family: &[DnfFormula],
    sigma: Restriction,
    w: usize,
) -> Result<(), CertificateError> {
    match node {
        CommonTree::Query { var, zero, one } => {
            if sigma.is_fixed(*var) {
                return Err(CertificateError::QueryOnFixed { var: *var });
            }
            let mut s0 = sigma.clone();
            s0.assign(*var, false);
            validate_node(zero, family, s0, w)?;
            let mut s1 = sigma;
            s1.assign(*var, true);
            validate_node(one, family, s1, w)
        }
        CommonTree::Leaf { completions } => {
            if completions.len() != family.len() {
                return Err(CertificateError::CompletionCount {
                    got: completions.len(),
                    expected: family.len(),
                });
            }
            let stars: Vec<usize> = sigma.stars().collect();
            for (i, (f, tree)) in family.iter().zip(completions).enumerate() {
                let depth = tree.depth();
                if depth > w {
                    return Err(CertificateError::CompletionTooDeep { formula: i, depth, w });
                }
                for code in 0..(1u64 << stars.len()) {
                    let mut full = sigma.value_bits();
                    for (pos, &v) in stars.iter().enumerate() {
                        if (code >> pos) & 1 == 1 {
                            full.set(v, true);
                        }
                    }
                    if tree.eval_bits(&full) != f.eval(&full) {
                        return Err(CertificateError::CompletionWrong { formula: i });
                    }
                }
            }
            Ok(())
        }
    }
}

/// Exhaustive oracle for the existence of `w`-partial depth-`t` decision
/// trees, memoized on the restriction reached.
pub struct FamilyDtOracle<'f> {
    family: &'f [DnfFormula],
    n: usize,
    w: usize,
    dt: DtOracle,
    memo: HashMap<Restriction, u8>,
}

impl<'f> FamilyDtOracle<'f> {
    pub fn new(family: &'f [DnfFormula], w: usize) -> Result<Self, PartialDtError> {
        Self::with_dim_cap(family, w, DEFAULT_FAMILY_DIM_CAP)
    }

    pub fn with_dim_cap(
        family: &'f [DnfFormula],
        w: usize,
        dim_cap: usize,
    ) -> Result<Self, PartialDtError> {
        let n = family.first().map_or(0, |f| f.dimension());
        if family.iter().any(|f| f.dimension() != n) {
            return Err(PartialDtError::MixedDimensions);
        }
        if n > dim_cap {
            return Err(PartialDtError::DimCapExceeded { dim: n, cap: dim_cap });
        }
        Ok(FamilyDtOracle { family, n, w, dt: DtOracle::new(dim_cap.max(16)), memo: HashMap::new() })
    }

    pub fn width_bound(&self) -> usize {
        self.w
    }

    pub fn dt_oracle(&mut self) -> &mut DtOracle {
        &mut self.dt
    }

    fn residual_depths(&mut self, sigma: &Restriction) -> Result<Vec<usize>, DtError> {
        let family = self.family;
        let dt = &mut self.dt;
        family.iter().map(|f| dt.depth_of_restricted(f, sigma)).collect()
    }

    /// Minimal depth of a common tree after which every formula has
    /// decision-tree depth at most `w`. Always at most the star count.
    pub fn common_depth_needed(&mut self, rho: &Restriction) -> Result<usize, DtError> {
        Ok(self.need(rho)? as usize)
    }

    fn need(&mut self, sigma: &Restriction) -> Result<u8, DtError> {
        if let Some(&v) = self.memo.get(sigma) {
            return Ok(v);
        }
        let depths = self.residual_depths(sigma)?;
        let worst = depths.iter().copied().max().unwrap_or(0);
        if worst <= self.w {
            self.memo.insert(sigma.clone(), 0);
            return Ok(0);
        }
        let lower = (worst - self.w) as u8;
        // Candidate queries: variables still alive in some unsettled formula.
        // Querying a variable that appears in no live formula changes nothing,
        // so skipping those is result-identical to searching all strategies.
        let mut candidates = crate::bits::VarSet::empty(self.n);
        for (f, &d) in self.family.iter().zip(&depths) {
            if d > self.w {
                candidates.union_with(&f.restrict(sigma).expect("dims agree").support());
            }
        }
        let mut best = u8::MAX;
        for v in candidates.iter() {
            let mut s0 = sigma.clone();
            s0.assign(v, false);
            let d0 = self.need(&s0)?;
            if best != u8::MAX && d0 + 1 >= best {
                continue;
            }
            let mut s1 = sigma.clone();
            s1.assign(v, true);
            let d1 = self.need(&s1)?;
            best = best.min(1 + d0.max(d1));
            if best == lower {
                break;
            }
        }
        self.memo.insert(sigma.clone(), best);
        Ok(best)
    }

    /// Whether the restricted family admits a `w`-partial depth-`t` tree.
    pub fn has_partial_dt(&mut self, rho: &Restriction, t: usize) -> Result<bool, PartialDtError> {
        if t > self.n {
            return Err(PartialDtError::BudgetOverDimension { t, n: self.n });
        }
        Ok(self.common_depth_needed(rho)? <= t)
    }

    /// An explicit certificate when one exists.
    pub fn certificate(
        &mut self,
        rho: &Restriction,
        t: usize,
    ) -> Result<Option<PartialDtCertificate>, PartialDtError> {
        if !self.has_partial_dt(rho, t)? {
            return Ok(None);
        }
        let tree = self.build(rho)?;
        Ok(Some(PartialDtCertificate { tree }))
    }

    fn build(&mut self, sigma: &Restriction) -> Result<CommonTree, DtError> {
        let depths = self.residual_depths(sigma)?;
        if depths.iter().all(|&d| d <= self.w) {
            let family = self.family;
            let mut completions = Vec::with_capacity(family.len());
            for f in family {
                let (table, support) = TruthTable::of_restricted(f, sigma);
                completions.push(self.dt.optimal_tree(&table, &support)?);
            }
            return Ok(CommonTree::Leaf { completions });
        }
        let mut candidates = crate::bits::VarSet::empty(self.n);
        for (f, &d) in self.family.iter().zip(&depths) {
            if d > self.w {
                candidates.union_with(&f.restrict(sigma).expect("dims agree").support());
            }
        }
        let mut best: Option<(u8, usize)> = None;
        for v in candidates.iter() {
            let mut s0 = sigma.clone();
            s0.assign(v, false);
            let mut s1 = sigma.clone();
            s1.assign(v, true);
            let c = 1 + self.need(&s0)?.max(self.need(&s1)?);
            if best.is_none_or(|(b, _)| c < b) {
                best = Some((c, v));
            }
        }
        let (_, v) = best.expect("unsettled family has a live variable");
        let mut s0 = sigma.clone();
        s0.assign(v, false);
        let mut s1 = sigma.clone();
        s1.assign(v, true);
        Ok(CommonTree::Query {
            var: v,
            zero: Box::new(self.build(&s0)?),
            one: Box::new(self.build(&s1)?),
        })
    }
}

/// Reference search over all adaptive strategies, querying any starred
/// variable with no pruning or memoization. Exponential; only for
/// cross-checking [`FamilyDtOracle`] on tiny instances.
pub fn exhaustive_common_depth_ok(
    family: &[DnfFormula],
    rho: &Restriction,
    w: usize,
    t: usize,
    dt: &mut DtOracle,
) -> Result<bool, DtError> {
    let settled = family
        .iter()
        .map(|f| dt.depth_of_restricted(f, rho).map(|d| d <= w))
        .collect::<Result<Vec<bool>, _>>()?
        .into_iter()
        .all(|ok| ok);
    if settled {
        return Ok(true);
    }
    if t == 0 {
        return Ok(false);
    }
    for v in rho.stars().collect::<Vec<_>>() {
        let mut r0 = rho.clone();
        r0.assign(v, false);
        let mut r1 = rho.clone();
        r1.assign(v, true);
        if exhaustive_common_depth_ok(family, &r0, w, t - 1, dt)?
            && exhaustive_common_depth_ok(family, &r1, w, t - 1, dt)?
        {
            return Ok(true);
        }
    }
    Ok(false)
}

/// One outer round of the canonical partial decision tree: the formula that
/// was worked on, the inner consultation blocks, and the committed query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialRunStage {
    pub formula: usize,
    pub inner: Vec<TranscriptStep>,
    /// Committed variable set `I`, ascending.
    pub committed_vars: Vec<usize>,
    /// Responses from the adversarial input, aligned with `committed_vars`.
    pub beta: Vec<bool>,
    pub counter_after: usize,
}

/// Full record of a canonical partial decision tree run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDtRun {
    pub stages: Vec<PartialRunStage>,
    pub counter: usize,
    pub final_restriction: Restriction,
}

impl PartialDtRun {
    pub fn reached(&self, t: usize) -> bool {
        self.counter >= t
    }

    pub fn min_committed_block(&self) -> Option<usize> {
        self.stages.iter().map(|s| s.committed_vars.len()).min()
    }
}

/// Runs the canonical partial decision tree on the family restricted by
/// `rho`, consulting `z` for tentative answers and committing blocks answered
/// by `beta`. Stops once `counter >= t` or when no formula needs more than
/// `w` further queries.
pub fn canonical_partial_dt_run(
    family: &[DnfFormula],
    rho: &Restriction,
    z: &BitString,
    beta: &mut dyn BlockOracle,
    w: usize,
    t: usize,
    dt: &mut DtOracle,
) -> Result<PartialDtRun, PartialDtError> {
    let mut x = rho.clone();
    let mut counter = 0usize;
    let mut scan_from = 0usize;
    let mut stages = Vec::new();
    while counter < t {
        let mut pick = None;
        for i in scan_from..family.len() {
            if dt.depth_of_restricted(&family[i], &x)? > w {
                pick = Some(i);
                break;
            }
        }
        let Some(i) = pick else { break };
        let f = &family[i];
        let mut y = Restriction::all_star(x.dimension());
        let mut inner = Vec::new();
        let mut committed: Vec<usize> = Vec::new();
        loop {
            let xy = x.compose(&y).expect("same dimension");
            if f.restrict(&xy).expect("same dimension").as_constant().is_some() || counter >= t {
                break;
            }
            let (term, unknown) = first_live_term(f, &xy)
                .expect("non-constant restricted formula has a live term");
            let responses: Vec<bool> = unknown.iter().map(|&v| z.get(v)).collect();
            for (&v, &b) in unknown.iter().zip(&responses) {
                y.assign(v, b);
            }
            counter += unknown.len();
            committed.extend(&unknown);
            inner.push(TranscriptStep { term, vars: unknown, responses });
        }
        committed.sort_unstable();
        let beta_vals = beta
            .respond_block(&committed)
            .ok_or_else(|| PartialDtError::OracleFailed(committed.clone()))?;
        for (&v, &b) in committed.iter().zip(&beta_vals) {
            x.assign(v, b);
        }
        stages.push(PartialRunStage {
            formula: i,
            inner,
            committed_vars: committed,
            beta: beta_vals,
            counter_after: counter,
        });
        scan_from = i;
    }
    Ok(PartialDtRun { stages, counter, final_restriction: x })
}

fn first_live_term(f: &DnfFormula, x: &Restriction) -> Option<(usize, Vec<usize>)> {
    for (j, term) in f.terms().iter().enumerate() {
        match term.status_under(x) {
            TermStatus::Falsified => continue,
            TermStatus::Satisfied => return None,
            TermStatus::Live { unknown } => return Some((j, unknown)),
        }
    }
    None
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

    #[test]
    fn trivial_budgets() {
        // With w at least every DT depth, the empty common tree suffices.
        let family = vec![dnf(4, &[&[(0, false), (1, false)]]), dnf(4, &[&[(2, false)]])];
        let mut oracle = FamilyDtOracle::new(&family, 2).unwrap();
        assert!(oracle.has_partial_dt(&Restriction::all_star(4), 0).unwrap());
    }

    #[test]
    fn two_variable_and_needs_more_than_one_query() {
        let family = vec![dnf(2, &[&[(0, false), (1, false)]])];
        let mut oracle = FamilyDtOracle::new(&family, 0).unwrap();
        assert!(!oracle.has_partial_dt(&Restriction::all_star(2), 1).unwrap());
    }

    #[test]
    fn shared_variable_family() {
        // {x0, x0 ∨ x1} has a 1-partial depth-1 tree: query x0.
        let family = vec![dnf(2, &[&[(0, false)]]), dnf(2, &[&[(0, false)], &[(1, false)]])];
        let mut oracle = FamilyDtOracle::new(&family, 1).unwrap();
        assert!(oracle.has_partial_dt(&Restriction::all_star(2), 1).unwrap());
        let cert = oracle.certificate(&Restriction::all_star(2), 1).unwrap().unwrap();
        cert.validate(&family, &Restriction::all_star(2), 1, 1).unwrap();
    }

    #[test]
    fn certificate_validates_on_random_family() {
        let family = vec![
            dnf(6, &[&[(0, false), (1, false)], &[(2, true), (3, false)]]),
            dnf(6, &[&[(1, true), (4, false)], &[(5, false), (0, false)]]),
        ];
        let rho = Restriction::all_star(6);
        let mut oracle = FamilyDtOracle::new(&family, 1).unwrap();
        let needed = oracle.common_depth_needed(&rho).unwrap();
        let cert = oracle.certificate(&rho, needed).unwrap().unwrap();
        assert_eq!(cert.common_depth(), needed);
        cert.validate(&family, &rho, 1, needed).unwrap();
        // One below the minimum must fail.
        assert!(!oracle.has_partial_dt(&rho, needed - 1).unwrap());
    }

    #[test]
    fn oracle_matches_unpruned_reference() {
        // The pruned, support-restricted search must agree with the plain
        // all-strategies search; checked up to n = 8.
        let families: Vec<Vec<DnfFormula>> = vec![
            vec![dnf(5, &[&[(0, false), (1, false)], &[(2, false), (3, true)]])],
            vec![
                dnf(5, &[&[(0, false), (2, false)], &[(4, true)]]),
                dnf(5, &[&[(1, true), (3, false)], &[(0, false), (4, false)]]),
            ],
            vec![
                dnf(8, &[&[(0, false), (3, false), (6, false)], &[(1, true), (7, false)]]),
                dnf(8, &[&[(2, false), (4, false)], &[(5, true), (6, true), (0, false)]]),
            ],
        ];
        for family in &families {
            let n = family[0].dimension();
            for w in 0..=2usize {
                for t in 0..=3usize {
                    let rho = Restriction::all_star(n);
                    let mut oracle = FamilyDtOracle::new(family, w).unwrap();
                    let fast = oracle.has_partial_dt(&rho, t).unwrap();
                    let mut dt = DtOracle::default();
                    let slow = exhaustive_common_depth_ok(family, &rho, w, t, &mut dt).unwrap();
                    assert_eq!(fast, slow, "n={n} w={w} t={t}");
                }
            }
        }
    }

    #[test]
    fn partial_run_constant_family_is_empty() {
        let family = vec![DnfFormula::constant(3, true), DnfFormula::constant(3, false)];
        let z = BitString::zeros(3);
        let beta = BitString::zeros(3);
        let mut dt = DtOracle::default();
        let run = canonical_partial_dt_run(
            &family,
            &Restriction::all_star(3),
            &z,
            &mut &beta,
            1,
            4,
            &mut dt,
        )
        .unwrap();
        assert!(run.stages.is_empty());
        assert_eq!(run.counter, 0);
    }

    #[test]
    fn partial_run_single_formula() {
        // DT(x0 ∧ x1) = 2 > w = 1 triggers one outer round querying both vars.
        let family = vec![dnf(2, &[&[(0, false), (1, false)]])];
        let z = BitString::parse_binary("11").unwrap();
        let beta = BitString::parse_binary("00").unwrap();
        let mut dt = DtOracle::default();
        let run = canonical_partial_dt_run(
            &family,
            &Restriction::all_star(2),
            &z,
            &mut &beta,
            1,
            4,
            &mut dt,
        )
        .unwrap();
        assert_eq!(run.stages.len(), 1);
        assert_eq!(run.stages[0].formula, 0);
        assert_eq!(run.stages[0].committed_vars, vec![0, 1]);
        assert_eq!(run.counter, 2);
    }

    #[test]
    fn partial_run_counter_stays_under_t_plus_k() {
        let family = vec![
            dnf(6, &[&[(0, false), (1, false), (2, false)], &[(3, false), (4, false)]]),
            dnf(6, &[&[(2, true), (5, false)], &[(0, true), (3, false), (5, true)]]),
        ];
        let k = family.iter().map(DnfFormula::width).max().unwrap();
        let mut dt = DtOracle::default();
        for zc in 0..64u64 {
            for bc in [0u64, 21, 63] {
                let z = BitString::from_u64(6, zc);
                let beta = BitString::from_u64(6, bc);
                for t in 1..=4usize {
                    let run = canonical_partial_dt_run(
                        &family,
                        &Restriction::all_star(6),
                        &z,
                        &mut &beta,
                        1,
                        t,
                        &mut dt,
                    )
                    .unwrap();
                    assert!(run.counter <= t + k - 1, "counter {} t {t} k {k}", run.counter);
                }
            }
        }
    }
}
