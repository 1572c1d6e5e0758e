//! DNF and CNF formulas with ordered terms.
//!
//! Term order is significant and preserved everywhere: the canonical decision
//! tree and the witness definitions scan terms first to last, so no sorting
//! or deduplication is applied to the term list. Literals inside a term are
//! kept sorted by variable index, which fixes the "relative position" order
//! used by witnesses.
//!
//! Degenerate conventions: the empty DNF is constant 0 and a DNF containing
//! an empty term is constant 1; dually for CNFs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitString, VarSet};
use crate::restriction::{Cell, Restriction, RestrictionError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("duplicate variable {var} in term")]
    DuplicateVariable { var: usize },
    #[error("variable {var} out of range for dimension {dim}")]
    VariableOutOfRange { var: usize, dim: usize },
    #[error(transparent)]
    Restriction(#[from] RestrictionError),
}

/// A possibly negated variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    /// Truth value of the literal given the value of its variable.
    pub fn satisfied_by(&self, bit: bool) -> bool {
        bit != self.negated
    }
}

/// Status of a conjunction of literals under a partial assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermStatus {
    /// Some literal is fixed to false.
    Falsified,
    /// Every literal is fixed to true.
    Satisfied,
    /// No literal is fixed to false; `unknown` lists the starred variables in
    /// ascending order.
    Live { unknown: Vec<usize> },
}

/// An ordered set of literals on distinct variables. Interpreted as an AND
/// when used as a DNF term and as an OR when used as a CNF clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    lits: Vec<Literal>,
}

impl Term {
    pub fn new(mut lits: Vec<Literal>) -> Result<Self, FormulaError> {
        lits.sort_by_key(|l| l.var);
        for pair in lits.windows(2) {
            if pair[0].var == pair[1].var {
                return Err(FormulaError::DuplicateVariable { var: pair[0].var });
            }
        }
        Ok(Term { lits })
    }

    pub fn empty() -> Self {
        Term { lits: Vec::new() }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    /// Variables of the term in ascending order.
    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.lits.iter().map(|l| l.var)
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// Conjunction value on a full assignment.
    pub fn eval_and(&self, x: &BitString) -> bool {
        self.lits.iter().all(|l| l.satisfied_by(x.get(l.var)))
    }

    /// Disjunction value on a full assignment.
    pub fn eval_or(&self, x: &BitString) -> bool {
        self.lits.iter().any(|l| l.satisfied_by(x.get(l.var)))
    }

    /// Conjunction status under a partial assignment.
    pub fn status_under(&self, rho: &Restriction) -> TermStatus {
        let mut unknown = Vec::new();
        for l in &self.lits {
            match rho.get(l.var) {
                Cell::Star => unknown.push(l.var),
                Cell::Zero => {
                    if !l.satisfied_by(false) {
                        return TermStatus::Falsified;
                    }
                }
                Cell::One => {
                    if !l.satisfied_by(true) {
                        return TermStatus::Falsified;
                    }
                }
            }
        }
        if unknown.is_empty() {
            TermStatus::Satisfied
        } else {
            TermStatus::Live { unknown }
        }
    }

    /// Keeps only literals on starred variables; callers must have checked
    /// the term is not falsified.
    fn strip_fixed(&self, rho: &Restriction) -> Term {
        Term {
            lits: self
                .lits
                .iter()
                .copied()
                .filter(|l| matches!(rho.get(l.var), Cell::Star))
                .collect(),
        }
    }

    fn check_dim(&self, n: usize) -> Result<(), FormulaError> {
        for l in &self.lits {
            if l.var >= n {
                return Err(FormulaError::VariableOutOfRange { var: l.var, dim: n });
            }
        }
        Ok(())
    }

    /// Wire count of the term as a gate input: a multi-literal term is a
    /// bottom gate (one wire per literal plus one wire into its parent), a
    /// single literal feeding a higher gate costs its own input wire plus the
    /// connection, and an empty term is a bare constant wire.
    fn wires_as_child(&self) -> usize {
        match self.lits.len() {
            0 => 1,
            1 => 2,
            k => k + 1,
        }
    }
}

/// A Boolean function over `{0,1}^n`; the common surface of formulas,
/// circuits and decision trees.
pub trait BooleanFn {
    fn dimension(&self) -> usize;

    fn eval(&self, x: &BitString) -> bool;

    /// Evaluates 64 assignments at once. `cols[v]` holds the values of
    /// variable `v` across the 64 lanes. The default goes lane by lane;
    /// implementations override it with genuinely bit-parallel code.
    fn eval_block(&self, cols: &[u64]) -> u64 {
        let n = self.dimension();
        let mut out = 0u64;
        for lane in 0..64 {
            let x = BitString::from_fn(n, |v| (cols[v] >> lane) & 1 == 1);
            if self.eval(&x) {
                out |= 1 << lane;
            }
        }
        out
    }
}

/// Size, width and depth of a circuit-shaped object, in the wire-counting
/// convention (every gate input contributes one wire; a bare literal feeding
/// a non-bottom gate additionally contributes its own input wire).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measures {
    pub size_wires: usize,
    pub width: usize,
    pub depth: usize,
}

/// A disjunction of conjunctive terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DnfFormula {
    n: usize,
    terms: Vec<Term>,
}

/// A conjunction of disjunctive clauses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Term>,
}

impl DnfFormula {
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self, FormulaError> {
        for t in &terms {
            t.check_dim(n)?;
        }
        Ok(DnfFormula { n, terms })
    }

    pub fn constant(n: usize, value: bool) -> Self {
        let terms = if value { vec![Term::empty()] } else { Vec::new() };
        DnfFormula { n, terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term(&self, i: usize) -> &Term {
        &self.terms[i]
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn width(&self) -> usize {
        self.terms.iter().map(Term::len).max().unwrap_or(0)
    }

    /// Syntactic constancy: empty formula is 0, a formula containing an empty
    /// term is 1. `None` means not syntactically constant.
    pub fn as_constant(&self) -> Option<bool> {
        if self.terms.is_empty() {
            Some(false)
        } else if self.terms.iter().any(Term::is_empty) {
            Some(true)
        } else {
            None
        }
    }

    /// Variables appearing in some term.
    pub fn support(&self) -> VarSet {
        let mut s = VarSet::empty(self.n);
        for t in &self.terms {
            for v in t.vars() {
                s.insert(v);
            }
        }
        s
    }

    /// Restriction simplification: falsified terms are dropped, literals fixed
    /// true are removed, and a fully satisfied term collapses the formula to
    /// constant 1. Term order is preserved. For every `y`,
    /// `restrict(rho).eval(y) == eval(rho ∘ y)`.
    pub fn restrict(&self, rho: &Restriction) -> Result<DnfFormula, FormulaError> {
        if rho.dimension() != self.n {
            return Err(RestrictionError::DimensionMismatch {
                left: self.n,
                right: rho.dimension(),
            }
            .into());
        }
        let mut terms = Vec::new();
        for t in &self.terms {
            match t.status_under(rho) {
                TermStatus::Falsified => {}
                TermStatus::Satisfied => return Ok(DnfFormula::constant(self.n, true)),
                TermStatus::Live { .. } => terms.push(t.strip_fixed(rho)),
            }
        }
        Ok(DnfFormula { n: self.n, terms })
    }

    pub fn measures(&self) -> Measures {
        Measures {
            size_wires: self.terms.iter().map(Term::wires_as_child).sum(),
            width: self.width(),
            depth: 2,
        }
    }

    pub fn size_wires(&self) -> usize {
        self.measures().size_wires
    }
}

impl BooleanFn for DnfFormula {
    fn dimension(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &BitString) -> bool {
        self.terms.iter().any(|t| t.eval_and(x))
    }

    fn eval_block(&self, cols: &[u64]) -> u64 {
        let mut out = 0u64;
        for t in &self.terms {
            let mut acc = u64::MAX;
            for l in t.literals() {
                let c = cols[l.var];
                acc &= if l.negated { !c } else { c };
                if acc == 0 {
                    break;
                }
            }
            out |= acc;
            if out == u64::MAX {
                break;
            }
        }
        out
    }
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Term>) -> Result<Self, FormulaError> {
        for c in &clauses {
            c.check_dim(n)?;
        }
        Ok(CnfFormula { n, clauses })
    }

    pub fn constant(n: usize, value: bool) -> Self {
        let clauses = if value { Vec::new() } else { vec![Term::empty()] };
        CnfFormula { n, clauses }
    }

    pub fn clauses(&self) -> &[Term] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn width(&self) -> usize {
        self.clauses.iter().map(Term::len).max().unwrap_or(0)
    }

    /// Mirror of [`DnfFormula::as_constant`]: empty CNF is 1, a CNF containing
    /// an empty clause is 0.
    pub fn as_constant(&self) -> Option<bool> {
        if self.clauses.is_empty() {
            Some(true)
        } else if self.clauses.iter().any(Term::is_empty) {
            Some(false)
        } else {
            None
        }
    }

    pub fn support(&self) -> VarSet {
        let mut s = VarSet::empty(self.n);
        for c in &self.clauses {
            for v in c.vars() {
                s.insert(v);
            }
        }
        s
    }

    /// Mirror of [`DnfFormula::restrict`]: satisfied clauses are dropped,
    /// literals fixed false are removed, a fully falsified clause collapses
    /// the formula to constant 0.
    pub fn restrict(&self, rho: &Restriction) -> Result<CnfFormula, FormulaError> {
        if rho.dimension() != self.n {
            return Err(RestrictionError::DimensionMismatch {
                left: self.n,
                right: rho.dimension(),
            }
            .into());
        }
        let mut clauses = Vec::new();
        for c in &self.clauses {
            let mut kept = Vec::new();
            let mut satisfied = false;
            for l in c.literals() {
                match rho.get(l.var) {
                    Cell::Star => kept.push(*l),
                    Cell::Zero | Cell::One => {
                        if l.satisfied_by(matches!(rho.get(l.var), Cell::One)) {
                            satisfied = true;
                            break;
                        }
                    }
                }
            }
            if satisfied {
                continue;
            }
            if kept.is_empty() {
                return Ok(CnfFormula::constant(self.n, false));
            }
            clauses.push(Term { lits: kept });
        }
        Ok(CnfFormula { n: self.n, clauses })
    }

    pub fn measures(&self) -> Measures {
        Measures {
            size_wires: self.clauses.iter().map(Term::wires_as_child).sum(),
            width: self.width(),
            depth: 2,
        }
    }

    pub fn size_wires(&self) -> usize {
        self.measures().size_wires
    }
}

impl BooleanFn for CnfFormula {
    fn dimension(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &BitString) -> bool {
        self.clauses.iter().all(|c| c.eval_or(x))
    }

    fn eval_block(&self, cols: &[u64]) -> u64 {
        let mut out = u64::MAX;
        for c in &self.clauses {
            let mut acc = 0u64;
            for l in c.literals() {
                let col = cols[l.var];
                acc |= if l.negated { !col } else { col };
                if acc == u64::MAX {
                    break;
                }
            }
            out &= acc;
            if out == 0 {
                break;
            }
        }
        out
    }
}

/// Lane columns for the 64 assignments whose index over `support` ranges over
/// `block_base + lane`. Variables outside `support` take the bits fixed by
/// `fixed`; starred non-support variables read as 0.
pub fn enumeration_columns(
    n: usize,
    support: &[usize],
    fixed: Option<&Restriction>,
    block_base: u64,
) -> Vec<u64> {
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let mut cols = vec![0u64; n];
    if let Some(rho) = fixed {
        for i in rho.fixed_indices() {
            if matches!(rho.get(i), Cell::One) {
                cols[i] = u64::MAX;
            }
        }
    }
    for (j, &v) in support.iter().enumerate() {
        cols[v] = if j < 6 {
            PATTERNS[j]
        } else if (block_base >> j) & 1 == 1 {
            u64::MAX
        } else {
            0
        };
    }
    cols
}
