//! Powerful refutations: auxiliary strings that force the canonical partial
//! decision tree to spend its whole query budget in large blocks.
//!
//! The finder monitors a simulated run and fills the auxiliary string and the
//! adversarial input as they are consulted: block answers are tried in order
//! of decreasing residual decision-tree depth (keeping the chosen formula
//! expensive until the block has at least `w` variables), and committed
//! answers are tried preserving "no small partial decision tree remains"
//! first. Where the greedy choice strands the run, the finder backtracks.

use thiserror::Error;

use crate::bits::BitString;
use crate::formula::DnfFormula;
use crate::partial::{
    canonical_partial_dt_run, FamilyDtOracle, PartialDtError, PartialDtRun,
};
use crate::restriction::Restriction;
use crate::truth::DtError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RefutationError {
    #[error(transparent)]
    Partial(#[from] PartialDtError),
    #[error(transparent)]
    Dt(#[from] DtError),
    #[error("width parameter w must be positive")]
    ZeroWidth,
    #[error("search budget exhausted")]
    BudgetExhausted,
    #[error("no refutation found although no partial decision tree exists")]
    NotFound,
    #[error("constructed refutation failed to replay")]
    ReplayMismatch,
}

/// An auxiliary string and adversarial input whose canonical partial run
/// makes at least `t` queries in committed blocks of size at least `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub z: BitString,
    pub beta: BitString,
}

/// Runs the canonical partial decision tree on the candidate strings and
/// checks the refutation conditions.
pub fn replay_refutation(
    family: &[DnfFormula],
    rho: &Restriction,
    refutation: &Refutation,
    w: usize,
    t: usize,
) -> Result<bool, RefutationError> {
    let run = run_candidate(family, rho, refutation, w, t)?;
    Ok(run.reached(t) && run.min_committed_block().is_some_and(|b| b >= w))
}

fn run_candidate(
    family: &[DnfFormula],
    rho: &Restriction,
    refutation: &Refutation,
    w: usize,
    t: usize,
) -> Result<PartialDtRun, RefutationError> {
    let mut dt = crate::truth::DtOracle::default();
    let mut beta_oracle = &refutation.beta;
    Ok(canonical_partial_dt_run(family, rho, &refutation.z, &mut beta_oracle, w, t, &mut dt)?)
}

/// Searches for a powerful refutation. Returns `None` when the family does
/// have a `w`-partial depth-`t` decision tree under `rho`.
pub fn find_powerful_refutation(
    family: &[DnfFormula],
    rho: &Restriction,
    w: usize,
    t: usize,
) -> Result<Option<Refutation>, RefutationError> {
    if w == 0 {
        return Err(RefutationError::ZeroWidth);
    }
    let mut oracle = FamilyDtOracle::new(family, w)?;
    if oracle.has_partial_dt(rho, t)? {
        return Ok(None);
    }
    let n = rho.dimension();
    let mut search = Search {
        family,
        w,
        t,
        oracle,
        z: Restriction::all_star(n),
        beta: Restriction::all_star(n),
        nodes_left: 2_000_000,
    };
    if !search.outer(rho, 0, 0)? {
        return Err(RefutationError::NotFound);
    }
    let refutation =
        Refutation { z: search.z.value_bits(), beta: search.beta.value_bits() };
    if !replay_refutation(family, rho, &refutation, w, t)? {
        return Err(RefutationError::ReplayMismatch);
    }
    Ok(Some(refutation))
}

struct Search<'f> {
    family: &'f [DnfFormula],
    w: usize,
    t: usize,
    oracle: FamilyDtOracle<'f>,
    z: Restriction,
    beta: Restriction,
    nodes_left: u64,
}

impl<'f> Search<'f> {
    fn spend(&mut self) -> Result<(), RefutationError> {
        if self.nodes_left == 0 {
            return Err(RefutationError::BudgetExhausted);
        }
        self.nodes_left -= 1;
        Ok(())
    }

    fn outer(
        &mut self,
        x: &Restriction,
        scan_from: usize,
        counter: usize,
    ) -> Result<bool, RefutationError> {
        self.spend()?;
        if counter >= self.t {
            return Ok(true);
        }
        let mut pick = None;
        for i in scan_from..self.family.len() {
            if self.oracle.dt_oracle().depth_of_restricted(&self.family[i], x)? > self.w {
                pick = Some(i);
                break;
            }
        }
        let Some(i) = pick else { return Ok(false) };
        let y = Restriction::all_star(x.dimension());
        self.inner(x, i, &y, &[], counter)
    }

    fn inner(
        &mut self,
        x: &Restriction,
        formula: usize,
        y: &Restriction,
        committed: &[usize],
        counter: usize,
    ) -> Result<bool, RefutationError> {
        self.spend()?;
        let f = &self.family[formula];
        let xy = x.compose(y).expect("same dimension");
        let constant = f.restrict(&xy).expect("same dimension").as_constant().is_some();
        if constant || counter >= self.t {
            return self.commit(x, formula, y, committed, counter);
        }
        let (_, block) = first_live_term(f, &xy).expect("non-constant formula has a live term");
        // Order the block answers: while the block is still short of w, keep
        // the formula as deep as possible; afterwards prefer killing it fast.
        let keep_alive = committed.len() + block.len() < self.w;
        let mut ranked: Vec<(usize, u64)> = Vec::with_capacity(1 << block.len());
        for bits in 0..(1u64 << block.len()) {
            let mut trial = xy.clone();
            for (pos, &v) in block.iter().enumerate() {
                trial.assign(v, (bits >> pos) & 1 == 1);
            }
            let d = self.oracle.dt_oracle().depth_of_restricted(f, &trial)?;
            ranked.push((d, bits));
        }
        ranked.sort_by_key(|&(d, bits)| (if keep_alive { usize::MAX - d } else { d }, bits));
        for (_, bits) in ranked {
            let mut y2 = y.clone();
            for (pos, &v) in block.iter().enumerate() {
                y2.assign(v, (bits >> pos) & 1 == 1);
            }
            let mut committed2 = committed.to_vec();
            committed2.extend(&block);
            if self.inner(x, formula, &y2, &committed2, counter + block.len())? {
                for (pos, &v) in block.iter().enumerate() {
                    self.z.assign(v, (bits >> pos) & 1 == 1);
                }
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn commit(
        &mut self,
        x: &Restriction,
        formula: usize,
        _y: &Restriction,
        committed: &[usize],
        counter: usize,
    ) -> Result<bool, RefutationError> {
        if committed.len() < self.w {
            return Ok(false);
        }
        let mut block = committed.to_vec();
        block.sort_unstable();
        if counter >= self.t {
            // The run ends right after this commit; the answers no longer
            // matter, so fill with zeros.
            for &v in &block {
                self.beta.assign(v, false);
            }
            return Ok(true);
        }
        let remaining = self.t - counter;
        let mut ranked: Vec<(bool, u64)> = Vec::with_capacity(1 << block.len());
        for bits in 0..(1u64 << block.len()) {
            let mut x2 = x.clone();
            for (pos, &v) in block.iter().enumerate() {
                x2.assign(v, (bits >> pos) & 1 == 1);
            }
            // Prefer answers under which no small partial tree remains.
            let keeps_hard = !self.oracle.has_partial_dt(&x2, remaining)?;
            ranked.push((keeps_hard, bits));
        }
        ranked.sort_by_key(|&(keeps_hard, bits)| (!keeps_hard, bits));
        for (_, bits) in ranked {
            let mut x2 = x.clone();
            for (pos, &v) in block.iter().enumerate() {
                x2.assign(v, (bits >> pos) & 1 == 1);
            }
            if self.outer(&x2, formula, counter)? {
                for (pos, &v) in block.iter().enumerate() {
                    self.beta.assign(v, (bits >> pos) & 1 == 1);
                }
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn first_live_term(f: &DnfFormula, x: &Restriction) -> Option<(usize, Vec<usize>)> {
    use crate::formula::TermStatus;
    for (j, term) in f.terms().iter().enumerate() {
        match term.status_under(x) {
            TermStatus::Falsified => continue,
            TermStatus::Satisfied => return None,
            TermStatus::Live { unknown } => return Some((j, unknown)),
        }
    }
    None
}
