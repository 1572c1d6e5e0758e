//! Truth tables and the exact decision-tree depth oracle.
//!
//! Depth is computed by the minimax recursion
//! `DT(f) = min_v (1 + max(DT(f|v=0), DT(f|v=1)))`, with `DT(const) = 0`,
//! memoized on the canonical key of the (projected) truth table. The
//! recursion revisits restrictions heavily, so the cache matters; it is
//! bounded by a byte budget with segmented second-chance eviction, and beyond
//! the budget entries are simply recomputed.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{enumeration_columns, BooleanFn, DnfFormula};
use crate::restriction::Restriction;
use crate::tree::DecisionTree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DtError {
    #[error("{live} live variables exceed the configured cap {cap}")]
    CapExceeded { live: usize, cap: usize },
}

/// A truth table over an explicit list of (ambient) support variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn from_fn(arity: usize, f: impl Fn(u64) -> bool) -> Self {
        let size = 1usize << arity;
        let mut words = vec![0u64; size.div_ceil(64)];
        for idx in 0..size as u64 {
            if f(idx) {
                words[(idx / 64) as usize] |= 1 << (idx % 64);
            }
        }
        TruthTable { arity, words }
    }

    /// Tabulates `f` restricted by `rho` over the live support returned in
    /// the second component (ascending ambient indices). Input index bit `j`
    /// corresponds to support variable `j`.
    pub fn of_restricted(f: &DnfFormula, rho: &Restriction) -> (TruthTable, Vec<usize>) {
        let restricted = f.restrict(rho).expect("dimension checked by caller");
        let support: Vec<usize> = restricted.support().iter().collect();
        let arity = support.len();
        let size = 1usize << arity;
        let mut words = vec![0u64; size.div_ceil(64)];
        for (w, word) in words.iter_mut().enumerate() {
            let base = (w * 64) as u64;
            let cols = enumeration_columns(f.dimension(), &support, Some(rho), base);
            *word = f.eval_block(&cols);
        }
        if arity < 6 {
            let mask = (1u64 << size) - 1;
            words[0] &= mask;
        }
        (TruthTable { arity, words }, support)
    }

    /// Tabulates an arbitrary Boolean function restricted by `rho` over the
    /// given support variables.
    pub fn of_fn_restricted(f: &dyn BooleanFn, rho: &Restriction, support: &[usize]) -> TruthTable {
        let arity = support.len();
        let size = 1usize << arity;
        let mut words = vec![0u64; size.div_ceil(64)];
        for (w, word) in words.iter_mut().enumerate() {
            let base = (w * 64) as u64;
            let cols = enumeration_columns(f.dimension(), support, Some(rho), base);
            *word = f.eval_block(&cols);
        }
        if arity < 6 {
            let mask = (1u64 << size) - 1;
            words[0] &= mask;
        }
        TruthTable { arity, words }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, idx: u64) -> bool {
        (self.words[(idx / 64) as usize] >> (idx % 64)) & 1 == 1
    }

    pub fn is_constant(&self) -> Option<bool> {
        if self.arity < 6 {
            let mask = (1u64 << (1usize << self.arity)) - 1;
            let w = self.words[0] & mask;
            if w == 0 {
                Some(false)
            } else if w == mask {
                Some(true)
            } else {
                None
            }
        } else if self.words.iter().all(|&w| w == 0) {
            Some(false)
        } else if self.words.iter().all(|&w| w == u64::MAX) {
            Some(true)
        } else {
            None
        }
    }

    /// The two subtables fixing position `pos` to 0 and to 1.
    pub fn cofactors(&self, pos: usize) -> (TruthTable, TruthTable) {
        debug_assert!(pos < self.arity);
        let sub = self.arity - 1;
        let mut zero = TruthTable { arity: sub, words: vec![0; (1usize << sub).div_ceil(64)] };
        let mut one = zero.clone();
        let low_mask = (1u64 << pos) - 1;
        for idx in 0..(1u64 << sub) {
            let expanded = ((idx & !low_mask) << 1) | (idx & low_mask);
            if self.get(expanded) {
                zero.words[(idx / 64) as usize] |= 1 << (idx % 64);
            }
            if self.get(expanded | (1 << pos)) {
                one.words[(idx / 64) as usize] |= 1 << (idx % 64);
            }
        }
        (zero, one)
    }

    fn byte_size(&self) -> usize {
        self.words.len() * 8 + 32
    }
}

/// Two-segment bounded cache: lookups promote from the old segment, and when
/// the live segment exceeds half the byte budget the old one is dropped.
struct SegCache {
    budget_bytes: usize,
    cur_bytes: usize,
    cur: HashMap<TruthTable, u8>,
    prev: HashMap<TruthTable, u8>,
}

impl SegCache {
    fn new(budget_bytes: usize) -> Self {
        SegCache { budget_bytes, cur_bytes: 0, cur: HashMap::new(), prev: HashMap::new() }
    }

    fn get(&mut self, key: &TruthTable) -> Option<u8> {
        if let Some(&v) = self.cur.get(key) {
            return Some(v);
        }
        if let Some((k, v)) = self.prev.remove_entry(key) {
            self.insert(k, v);
            return Some(v);
        }
        None
    }

    fn insert(&mut self, key: TruthTable, value: u8) {
        let cost = key.byte_size();
        if self.cur_bytes + cost > self.budget_bytes / 2 {
            self.prev = std::mem::take(&mut self.cur);
            self.cur_bytes = 0;
        }
        self.cur_bytes += cost;
        self.cur.insert(key, value);
    }
}

/// Exact decision-tree depth oracle with a bounded memo table.
pub struct DtOracle {
    cap: usize,
    cache: SegCache,
}

pub const DEFAULT_LIVE_VAR_CAP: usize = 16;
const DEFAULT_CACHE_BYTES: usize = 64 << 20;

impl Default for DtOracle {
    fn default() -> Self {
        Self::new(DEFAULT_LIVE_VAR_CAP)
    }
}

impl DtOracle {
    pub fn new(cap: usize) -> Self {
        Self::with_cache_budget(cap, DEFAULT_CACHE_BYTES)
    }

    pub fn with_cache_budget(cap: usize, budget_bytes: usize) -> Self {
        DtOracle { cap, cache: SegCache::new(budget_bytes) }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Exact depth of the function given by a truth table.
    pub fn depth_of_table(&mut self, table: &TruthTable) -> Result<usize, DtError> {
        if table.arity > self.cap {
            return Err(DtError::CapExceeded { live: table.arity, cap: self.cap });
        }
        Ok(self.depth_rec(table) as usize)
    }

    fn depth_rec(&mut self, table: &TruthTable) -> u8 {
        if table.is_constant().is_some() {
            return 0;
        }
        if let Some(v) = self.cache.get(table) {
            return v;
        }
        let mut best = table.arity as u8;
        for pos in 0..table.arity {
            let (zero, one) = table.cofactors(pos);
            let d0 = self.depth_rec(&zero);
            if d0 + 1 >= best {
                continue;
            }
            let d1 = self.depth_rec(&one);
            best = best.min(1 + d0.max(d1));
            if best == 1 {
                break;
            }
        }
        self.cache.insert(table.clone(), best);
        best
    }

    /// `DT(f|rho)`, the exact decision-tree depth of the restricted formula.
    pub fn depth_of_restricted(
        &mut self,
        f: &DnfFormula,
        rho: &Restriction,
    ) -> Result<usize, DtError> {
        let restricted = f.restrict(rho).expect("dimension mismatch");
        let live = restricted.support().len();
        if live > self.cap {
            return Err(DtError::CapExceeded { live, cap: self.cap });
        }
        let (table, _) = TruthTable::of_restricted(f, rho);
        self.depth_of_table(&table)
    }

    /// `DT(f)` over the full cube.
    pub fn depth_of_formula(&mut self, f: &DnfFormula) -> Result<usize, DtError> {
        self.depth_of_restricted(f, &Restriction::all_star(f.dimension()))
    }

    /// A depth-optimal tree for the table, with queries labelled by
    /// `support[pos]`.
    pub fn optimal_tree(
        &mut self,
        table: &TruthTable,
        support: &[usize],
    ) -> Result<DecisionTree, DtError> {
        assert_eq!(table.arity, support.len());
        if table.arity > self.cap {
            return Err(DtError::CapExceeded { live: table.arity, cap: self.cap });
        }
        Ok(self.tree_rec(table, support))
    }

    fn tree_rec(&mut self, table: &TruthTable, support: &[usize]) -> DecisionTree {
        if let Some(b) = table.is_constant() {
            return DecisionTree::Leaf(b);
        }
        let mut best: Option<(u8, usize, TruthTable, TruthTable)> = None;
        for pos in 0..table.arity {
            let (zero, one) = table.cofactors(pos);
            let d = 1 + self.depth_rec(&zero).max(self.depth_rec(&one));
            if best.as_ref().is_none_or(|(bd, ..)| d < *bd) {
                best = Some((d, pos, zero, one));
                if d == 1 {
                    break;
                }
            }
        }
        let (_, pos, zero, one) = best.expect("non-constant table has a variable");
        let mut sub = support.to_vec();
        sub.remove(pos);
        DecisionTree::Query {
            var: support[pos],
            zero: Box::new(self.tree_rec(&zero, &sub)),
            one: Box::new(self.tree_rec(&one, &sub)),
        }
    }
}

/// Exhaustively counts satisfying assignments of `f` over all `2^n` inputs.
pub fn count_satisfying(f: &dyn BooleanFn) -> u64 {
    let n = f.dimension();
    assert!(n <= 30, "exhaustive truth enumeration capped at n = 30");
    let support: Vec<usize> = (0..n).collect();
    if n <= 6 {
        let cols = enumeration_columns(n, &support, None, 0);
        let mask = if n == 6 { u64::MAX } else { (1u64 << (1u64 << n)) - 1 };
        return (f.eval_block(&cols) & mask).count_ones() as u64;
    }
    let blocks = (1u64 << n) / 64;
    (0..blocks)
        .map(|b| {
            let cols = enumeration_columns(n, &support, None, b * 64);
            f.eval_block(&cols).count_ones() as u64
        })
        .sum()
}

/// Exact expectation of `f` under the uniform distribution.
pub fn expectation_uniform(f: &dyn BooleanFn) -> f64 {
    count_satisfying(f) as f64 / (1u64 << f.dimension()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
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
    fn constant_depth_zero() {
        let mut oracle = DtOracle::default();
        assert_eq!(oracle.depth_of_formula(&DnfFormula::constant(4, true)).unwrap(), 0);
        assert_eq!(oracle.depth_of_formula(&DnfFormula::constant(4, false)).unwrap(), 0);
    }

    #[test]
    fn single_variable_depth_one() {
        let mut oracle = DtOracle::default();
        let f = dnf(3, &[&[(1, false)]]);
        assert_eq!(oracle.depth_of_formula(&f).unwrap(), 1);
    }

    #[test]
    fn or_of_two_variables_needs_two_queries() {
        let mut oracle = DtOracle::default();
        let f = dnf(2, &[&[(0, false)], &[(1, false)]]);
        assert_eq!(oracle.depth_of_formula(&f).unwrap(), 2);
    }

    #[test]
    fn semantically_constant_or() {
        // x0 ∨ ¬x0 is syntactically non-constant but has a constant table.
        let f = dnf(1, &[&[(0, false)], &[(0, true)]]);
        let mut oracle = DtOracle::default();
        assert_eq!(oracle.depth_of_formula(&f).unwrap(), 0);
    }

    #[test]
    fn depth_respects_restriction() {
        let f = dnf(3, &[&[(0, false), (1, false)], &[(2, false)]]);
        let mut oracle = DtOracle::default();
        let rho: Restriction = "**0".parse().unwrap();
        // With x2 = 0 the formula is x0 ∧ x1.
        assert_eq!(oracle.depth_of_restricted(&f, &rho).unwrap(), 2);
        let rho: Restriction = "**1".parse().unwrap();
        assert_eq!(oracle.depth_of_restricted(&f, &rho).unwrap(), 0);
    }

    #[test]
    fn cap_errors() {
        let mut oracle = DtOracle::new(2);
        let f = dnf(3, &[&[(0, false), (1, false), (2, false)]]);
        assert_eq!(
            oracle.depth_of_formula(&f),
            Err(DtError::CapExceeded { live: 3, cap: 2 })
        );
    }

    #[test]
    fn optimal_tree_computes_function() {
        let f = dnf(4, &[&[(0, false), (2, false)], &[(1, true), (3, false)]]);
        let (table, support) = TruthTable::of_restricted(&f, &Restriction::all_star(4));
        let mut oracle = DtOracle::default();
        let tree = oracle.optimal_tree(&table, &support).unwrap();
        assert_eq!(tree.depth(), oracle.depth_of_formula(&f).unwrap());
        tree.validate(4).unwrap();
        for v in 0..16u64 {
            let x = BitString::from_u64(4, v);
            assert_eq!(tree.eval_bits(&x), f.eval(&x), "input {v}");
        }
    }

    #[test]
    fn brute_force_cross_check_small() {
        // Compare the memoized oracle against a direct recursion without
        // tables on every 6-variable formula in a small randomish family.
        fn direct(f: &DnfFormula, rho: &Restriction) -> usize {
            let g = f.restrict(rho).unwrap();
            if g.as_constant().is_some() {
                return 0;
            }
            let (table, _) = TruthTable::of_restricted(f, rho);
            if table.is_constant().is_some() {
                return 0;
            }
            let mut best = usize::MAX;
            for v in g.support().iter() {
                let mut r0 = rho.clone();
                r0.assign(v, false);
                let mut r1 = rho.clone();
                r1.assign(v, true);
                best = best.min(1 + direct(f, &r0).max(direct(f, &r1)));
            }
            best
        }
        let fs = [
            dnf(5, &[&[(0, false), (1, false)], &[(2, true), (3, false)], &[(4, false)]]),
            dnf(5, &[&[(0, true), (4, true)], &[(1, false), (2, false), (3, true)]]),
        ];
        let mut oracle = DtOracle::default();
        for f in &fs {
            let star = Restriction::all_star(5);
            assert_eq!(oracle.depth_of_restricted(f, &star).unwrap(), direct(f, &star));
        }
    }

    #[test]
    fn count_satisfying_matches() {
        let f = dnf(7, &[&[(0, false), (6, false)], &[(2, true)]]);
        let mut expected = 0u64;
        for v in 0..128u64 {
            let x = BitString::from_u64(7, v);
            if f.eval(&x) {
                expected += 1;
            }
        }
        assert_eq!(count_satisfying(&f), expected);
    }
}
