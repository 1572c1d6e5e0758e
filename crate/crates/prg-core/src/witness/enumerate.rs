//! Exhaustive enumeration of (global) partial witnesses.
//!
//! Streams are plain iterators rebuilt from their parameters, so experiment
//! shards can recreate and skip into them independently.

use itertools::Itertools;

use super::{GlobalPartialStage, GlobalPartialWitness, PartialWitness, StagePattern};

/// All ordered compositions of `total` into at most `max_parts` parts, each
/// in `[1, max_part]`.
fn compositions(total: usize, max_part: usize, max_parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut acc = Vec::new();
    fn rec(
        remaining: usize,
        max_part: usize,
        max_parts: usize,
        acc: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            if !acc.is_empty() {
                out.push(acc.clone());
            }
            return;
        }
        if acc.len() == max_parts {
            return;
        }
        for part in 1..=max_part.min(remaining) {
            acc.push(part);
            rec(remaining - part, max_part, max_parts, acc, out);
            acc.pop();
        }
    }
    rec(total, max_part, max_parts, &mut acc, &mut out);
    out
}

fn stage_choices(k: usize, size: usize) -> Vec<StagePattern> {
    let mut out = Vec::new();
    for positions in (0..k).combinations(size) {
        for bits in 0..(1u64 << size) {
            let responses = (0..size).map(|i| (bits >> i) & 1 == 1).collect();
            out.push(StagePattern::new(positions.clone(), responses).expect("valid stage"));
        }
    }
    out
}

/// All structurally valid partial witnesses of exact size `s` over width-`k`
/// terms, with at most `max_stages` stages.
pub fn enumerate_partial_witnesses_of_size(
    k: usize,
    s: usize,
    max_stages: usize,
) -> Box<dyn Iterator<Item = PartialWitness>> {
    if k == 0 || s == 0 {
        return Box::new(std::iter::empty());
    }
    let comps = compositions(s, k, max_stages);
    Box::new(comps.into_iter().flat_map(move |comp| {
        comp.iter()
            .map(|&size| stage_choices(k, size))
            .multi_cartesian_product()
            .map(|stages| PartialWitness::new(stages).expect("nonempty"))
    }))
}

/// All structurally valid partial witnesses for query budget `t`: sizes range
/// over `[t, t + k - 1]` and the stage count is capped by `min(t, m_terms)`.
pub fn enumerate_partial_witnesses(
    k: usize,
    t: usize,
    m_terms: usize,
) -> Box<dyn Iterator<Item = PartialWitness>> {
    let max_stages = t.min(m_terms);
    Box::new((t..t + k).flat_map(move |s| enumerate_partial_witnesses_of_size(k, s, max_stages)))
}

/// All structurally valid global partial witnesses for a family of
/// `m_formulas` width-`k` DNFs and parameters `(w, t)`: at most `t / w`
/// stages with non-decreasing formula indices, total size in `[t, t + k]`,
/// and per-stage adversarial blocks of matching length.
pub fn enumerate_global_partial_witnesses(
    m_formulas: usize,
    k: usize,
    w: usize,
    t: usize,
) -> Box<dyn Iterator<Item = GlobalPartialWitness>> {
    assert!(w >= 1, "width parameter must be positive");
    let max_stages = t / w;
    if max_stages == 0 || m_formulas == 0 || k == 0 {
        return Box::new(std::iter::empty());
    }
    let iter = (1..=max_stages).flat_map(move |r| {
        (0..m_formulas).combinations_with_replacement(r).flat_map(move |formulas| {
            (t..=t + k).flat_map({
                let formulas = formulas.clone();
                move |total| {
                    let comps: Vec<Vec<usize>> =
                        compositions(total, total, r).into_iter().filter(|c| c.len() == r).collect();
                    let formulas = formulas.clone();
                    comps.into_iter().flat_map(move |sizes| {
                        let formulas = formulas.clone();
                        sizes
                            .iter()
                            .map(|&s| {
                                enumerate_partial_witnesses_of_size(k, s, s).collect::<Vec<_>>()
                            })
                            .multi_cartesian_product()
                            .flat_map(move |partials| {
                                let formulas = formulas.clone();
                                let beta_spaces: Vec<Vec<Vec<bool>>> = partials
                                    .iter()
                                    .map(|p| {
                                        let s = p.size();
                                        (0..(1u64 << s))
                                            .map(|bits| {
                                                (0..s).map(|i| (bits >> i) & 1 == 1).collect()
                                            })
                                            .collect()
                                    })
                                    .collect();
                                beta_spaces.into_iter().multi_cartesian_product().map(
                                    move |betas| GlobalPartialWitness {
                                        stages: formulas
                                            .iter()
                                            .zip(&partials)
                                            .zip(betas)
                                            .map(|((&formula, partial), beta)| GlobalPartialStage {
                                                formula,
                                                partial: partial.clone(),
                                                beta,
                                            })
                                            .collect(),
                                    },
                                )
                            })
                    })
                }
            })
        })
    });
    Box::new(iter)
}
