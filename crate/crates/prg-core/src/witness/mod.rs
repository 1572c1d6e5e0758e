//! Query-transcript witnesses for canonical decision trees.
//!
//! A witness records, stage by stage, which term the canonical procedure
//! queried, which positions of that term were still unknown, and the
//! responses received. Positions are stored relative to the term's sorted
//! variable list; helpers convert to absolute variable indices. A partial
//! witness omits the term indices, which are uniquely recoverable by replay.
//!
//! Global witnesses chain per-formula witnesses across a family: after each
//! stage the involved variables are overwritten by an adversarial block
//! before the next stage is interpreted.

mod cnf;
mod enumerate;
mod refute;
mod search;

pub use cnf::{build_global_witness_cnf, build_witness_cnf, WitnessCnfError};
pub use enumerate::{
    enumerate_global_partial_witnesses, enumerate_partial_witnesses,
    enumerate_partial_witnesses_of_size,
};
pub use refute::{find_powerful_refutation, replay_refutation, Refutation, RefutationError};
pub use search::{global_witness_search, witness_search, witness_search_decoupled, SearchError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{BooleanFn, DnfFormula, TermStatus};
use crate::restriction::Restriction;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("stage has {positions} positions but {responses} responses")]
    StageShape { positions: usize, responses: usize },
    #[error("stage positions must be strictly increasing")]
    PositionsNotSorted,
    #[error("witness has no stages")]
    Empty,
    #[error("term indices must be strictly increasing")]
    TermsNotIncreasing,
    #[error("term index {term} out of range for a formula with {terms} terms")]
    TermOutOfRange { term: usize, terms: usize },
    #[error("position {position} out of range for term {term} of length {len}")]
    PositionOutOfRange { term: usize, position: usize, len: usize },
    #[error("variable {var} does not occur in term {term}")]
    VarNotInTerm { term: usize, var: usize },
    #[error("formula index {formula} out of range for a family of {len}")]
    FormulaOutOfRange { formula: usize, len: usize },
    #[error("stage block has size {block} but beta has {beta} bits")]
    BetaShape { block: usize, beta: usize },
    #[error("width parameter w must be positive")]
    ZeroWidth,
    #[error("dimension mismatch: formula has {formula}, restriction has {restriction}")]
    DimensionMismatch { formula: usize, restriction: usize },
}

/// One stage of a (partial) witness: the unknown positions of the queried
/// term (relative to its sorted variable list, ascending) and the responses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StagePattern {
    positions: Vec<usize>,
    responses: Vec<bool>,
}

impl StagePattern {
    pub fn new(positions: Vec<usize>, responses: Vec<bool>) -> Result<Self, WitnessError> {
        if positions.len() != responses.len() {
            return Err(WitnessError::StageShape {
                positions: positions.len(),
                responses: responses.len(),
            });
        }
        if positions.is_empty() {
            return Err(WitnessError::Empty);
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(WitnessError::PositionsNotSorted);
        }
        Ok(StagePattern { positions, responses })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn responses(&self) -> &[bool] {
        &self.responses
    }

    pub fn size(&self) -> usize {
        self.positions.len()
    }

    /// Absolute variables of this pattern within `term` of formula `f`.
    fn absolute_in(&self, f: &DnfFormula, term: usize) -> Result<Vec<usize>, WitnessError> {
        if term >= f.term_count() {
            return Err(WitnessError::TermOutOfRange { term, terms: f.term_count() });
        }
        let lits = f.term(term).literals();
        self.positions
            .iter()
            .map(|&p| {
                lits.get(p).map(|l| l.var).ok_or(WitnessError::PositionOutOfRange {
                    term,
                    position: p,
                    len: lits.len(),
                })
            })
            .collect()
    }
}

/// A witness with its term indices removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialWitness {
    stages: Vec<StagePattern>,
}

impl PartialWitness {
    pub fn new(stages: Vec<StagePattern>) -> Result<Self, WitnessError> {
        if stages.is_empty() {
            return Err(WitnessError::Empty);
        }
        Ok(PartialWitness { stages })
    }

    pub fn stages(&self) -> &[StagePattern] {
        &self.stages
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn size(&self) -> usize {
        self.stages.iter().map(StagePattern::size).sum()
    }

    /// The structural constraints of a size-budget-`t` witness over width-`k`
    /// terms: at most `t` stages, positions within `[0, k)`, stage sizes in
    /// `[1, k]`, and total size in `[t, t + k - 1]`.
    pub fn is_structurally_valid(&self, t: usize, k: usize) -> bool {
        let r = self.stages.len();
        if r == 0 || r > t {
            return false;
        }
        for stage in &self.stages {
            if stage.size() == 0 || stage.size() > k {
                return false;
            }
            if stage.positions.iter().any(|&p| p >= k) {
                return false;
            }
        }
        let s = self.size();
        t <= s && s <= t + k - 1
    }
}

/// A full witness: strictly increasing term indices with one stage pattern per
/// term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    terms: Vec<usize>,
    stages: Vec<StagePattern>,
}

impl Witness {
    pub fn new(terms: Vec<usize>, stages: Vec<StagePattern>) -> Result<Self, WitnessError> {
        if terms.len() != stages.len() || stages.is_empty() {
            return Err(WitnessError::Empty);
        }
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(WitnessError::TermsNotIncreasing);
        }
        Ok(Witness { terms, stages })
    }

    pub fn terms(&self) -> &[usize] {
        &self.terms
    }

    pub fn stages(&self) -> &[StagePattern] {
        &self.stages
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn size(&self) -> usize {
        self.stages.iter().map(StagePattern::size).sum()
    }

    /// Drops the term indices.
    pub fn to_partial(&self) -> PartialWitness {
        PartialWitness { stages: self.stages.clone() }
    }

    pub fn is_structurally_valid(&self, t: usize, k: usize) -> bool {
        self.to_partial().is_structurally_valid(t, k)
    }

    /// Per-stage absolute variables within `f`.
    pub fn absolute_vars(&self, f: &DnfFormula) -> Result<Vec<Vec<usize>>, WitnessError> {
        self.terms
            .iter()
            .zip(&self.stages)
            .map(|(&term, stage)| stage.absolute_in(f, term))
            .collect()
    }

    /// All involved variables, ascending.
    pub fn involved_vars(&self, f: &DnfFormula) -> Result<Vec<usize>, WitnessError> {
        let mut vars: Vec<usize> = self.absolute_vars(f)?.into_iter().flatten().collect();
        vars.sort_unstable();
        vars.dedup();
        Ok(vars)
    }

    /// Absolute-index JSON form (golden-file format).
    pub fn to_absolute(&self, f: &DnfFormula) -> Result<WitnessJson, WitnessError> {
        let abs = self.absolute_vars(f)?;
        Ok(WitnessJson {
            stages: self
                .terms
                .iter()
                .zip(&self.stages)
                .zip(abs)
                .map(|((&term, stage), vars)| WitnessJsonStage {
                    term,
                    vars,
                    responses: stage.responses.iter().map(|&b| if b { '1' } else { '0' }).collect(),
                })
                .collect(),
        })
    }

    pub fn from_absolute(f: &DnfFormula, json: &WitnessJson) -> Result<Self, WitnessError> {
        let mut terms = Vec::new();
        let mut stages = Vec::new();
        for s in &json.stages {
            if s.term >= f.term_count() {
                return Err(WitnessError::TermOutOfRange { term: s.term, terms: f.term_count() });
            }
            let lits = f.term(s.term).literals();
            let positions = s
                .vars
                .iter()
                .map(|&v| {
                    lits.iter()
                        .position(|l| l.var == v)
                        .ok_or(WitnessError::VarNotInTerm { term: s.term, var: v })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let responses = s.responses.chars().map(|c| c == '1').collect();
            terms.push(s.term);
            stages.push(StagePattern::new(positions, responses)?);
        }
        Witness::new(terms, stages)
    }
}

/// Serialized witness stage with absolute variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJsonStage {
    pub term: usize,
    pub vars: Vec<usize>,
    pub responses: String,
}

/// Serialized witness with absolute variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub stages: Vec<WitnessJsonStage>,
}

/// One stage of a global witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalStage {
    pub formula: usize,
    pub witness: Witness,
    /// Adversarial block, aligned with the witness's involved variables in
    /// ascending order.
    pub beta: Vec<bool>,
}

/// A chained witness across a family of formulas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalWitness {
    pub stages: Vec<GlobalStage>,
}

impl GlobalWitness {
    pub fn size(&self) -> usize {
        self.stages.iter().map(|s| s.witness.size()).sum()
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn to_partial(&self) -> GlobalPartialWitness {
        GlobalPartialWitness {
            stages: self
                .stages
                .iter()
                .map(|s| GlobalPartialStage {
                    formula: s.formula,
                    partial: s.witness.to_partial(),
                    beta: s.beta.clone(),
                })
                .collect(),
        }
    }
}

/// One stage of a global partial witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalPartialStage {
    pub formula: usize,
    pub partial: PartialWitness,
    pub beta: Vec<bool>,
}

/// A global witness with every per-formula witness stripped to its partial
/// form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalPartialWitness {
    pub stages: Vec<GlobalPartialStage>,
}

impl GlobalPartialWitness {
    pub fn size(&self) -> usize {
        self.stages.iter().map(|s| s.partial.size()).sum()
    }
}

/// Deterministic replay of the witness conditions: all terms before each
/// stage's term are falsified by the accumulated assignment, the stage term
/// is consistent with exactly the recorded positions unknown, the responses
/// are written in, and every stage but the last leaves its term falsified
/// (otherwise the canonical procedure would have stopped).
pub fn is_witness(
    f: &DnfFormula,
    rho: &Restriction,
    wit: &Witness,
) -> Result<bool, WitnessError> {
    if f.dimension() != rho.dimension() {
        return Err(WitnessError::DimensionMismatch {
            formula: f.dimension(),
            restriction: rho.dimension(),
        });
    }
    let mut x = rho.clone();
    let r = wit.stages.len();
    let mut scan_from = 0usize;
    for (c, (&ell, stage)) in wit.terms.iter().zip(&wit.stages).enumerate() {
        let abs = stage.absolute_in(f, ell)?;
        for j in scan_from..ell {
            if !matches!(f.term(j).status_under(&x), TermStatus::Falsified) {
                return Ok(false);
            }
        }
        match f.term(ell).status_under(&x) {
            TermStatus::Live { unknown } if unknown == abs => {}
            _ => return Ok(false),
        }
        for (&v, &b) in abs.iter().zip(&stage.responses) {
            x.assign(v, b);
        }
        if c + 1 < r && !matches!(f.term(ell).status_under(&x), TermStatus::Falsified) {
            return Ok(false);
        }
        scan_from = ell + 1;
    }
    Ok(true)
}

/// Recovers the unique term-index completion of a partial witness, when one
/// exists. The first stage's term is forced (it is the first term the
/// canonical procedure would query), and each later stage follows by
/// induction.
pub fn complete_partial_witness(
    f: &DnfFormula,
    rho: &Restriction,
    pw: &PartialWitness,
) -> Result<Option<Witness>, WitnessError> {
    if f.dimension() != rho.dimension() {
        return Err(WitnessError::DimensionMismatch {
            formula: f.dimension(),
            restriction: rho.dimension(),
        });
    }
    let mut x = rho.clone();
    let r = pw.stages.len();
    let mut scan_from = 0usize;
    let mut terms = Vec::with_capacity(r);
    for (c, stage) in pw.stages.iter().enumerate() {
        let mut found = None;
        for j in scan_from..f.term_count() {
            match f.term(j).status_under(&x) {
                TermStatus::Falsified => continue,
                status => {
                    found = Some((j, status));
                    break;
                }
            }
        }
        let Some((ell, status)) = found else { return Ok(None) };
        let TermStatus::Live { unknown } = status else { return Ok(None) };
        let lits = f.term(ell).literals();
        let mut abs = Vec::with_capacity(stage.positions.len());
        for &p in &stage.positions {
            match lits.get(p) {
                Some(l) => abs.push(l.var),
                None => return Ok(None),
            }
        }
        if unknown != abs {
            return Ok(None);
        }
        for (&v, &b) in abs.iter().zip(&stage.responses) {
            x.assign(v, b);
        }
        if c + 1 < r && !matches!(f.term(ell).status_under(&x), TermStatus::Falsified) {
            return Ok(None);
        }
        terms.push(ell);
        scan_from = ell + 1;
    }
    Ok(Some(Witness { terms, stages: pw.stages.clone() }))
}

/// Replays a global witness: stage `c`'s witness must hold for the formula
/// `L_c` under the chained restriction, and the chained restriction is then
/// composed with the stage's adversarial block.
pub fn is_global_witness(
    family: &[DnfFormula],
    rho: &Restriction,
    gw: &GlobalWitness,
    w: usize,
    t: usize,
) -> Result<bool, WitnessError> {
    if w == 0 {
        return Err(WitnessError::ZeroWidth);
    }
    let k = family.iter().map(DnfFormula::width).max().unwrap_or(0);
    let r = gw.stages.len();
    if r == 0 || r > t / w {
        return Ok(false);
    }
    if gw.stages.windows(2).any(|s| s[0].formula > s[1].formula) {
        return Ok(false);
    }
    let total = gw.size();
    if total < t || total > t + k {
        return Ok(false);
    }
    let mut chained = rho.clone();
    for stage in &gw.stages {
        let f = family.get(stage.formula).ok_or(WitnessError::FormulaOutOfRange {
            formula: stage.formula,
            len: family.len(),
        })?;
        let size = stage.witness.size();
        if stage.beta.len() != size {
            return Err(WitnessError::BetaShape { block: size, beta: stage.beta.len() });
        }
        // Each stage's witness is a size-S witness: S queries against budget S.
        if !stage.witness.is_structurally_valid(size, f.width()) {
            return Ok(false);
        }
        if !is_witness(f, &chained, &stage.witness)? {
            return Ok(false);
        }
        let involved = stage.witness.involved_vars(f)?;
        if involved.len() != size {
            return Ok(false);
        }
        let mut overlay = Restriction::all_star(chained.dimension());
        for (&v, &b) in involved.iter().zip(&stage.beta) {
            overlay.assign(v, b);
        }
        chained = chained.compose(&overlay).expect("same dimension");
    }
    Ok(true)
}
