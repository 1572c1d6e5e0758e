//! Exhaustive bias measurement.
//!
//! The bias of a generator against a circuit is
//! `|E_seed f(expand(seed)) - E_uniform f|`. The uniform side is always
//! computed exactly by truth enumeration; the seed side here enumerates the
//! full seed space (Monte-Carlo estimation lives with the experiment
//! harness, which owns the sampling RNG).

use prg_core::{expectation_uniform, BitString, BooleanFn};

use crate::basegen::BaseGenerator;
use crate::PrimitiveError;

/// Hard cap on exhaustive seed enumeration.
pub const EXHAUSTIVE_SEED_BUDGET_BITS: u32 = 26;

fn seed_from_index(bits: usize, index: u64) -> BitString {
    BitString::from_fn(bits, |i| (index >> (bits - 1 - i)) & 1 == 1)
}

/// Exact `E_seed f(G(seed))` over the full seed space.
pub fn expectation_over_seeds(
    g: &BaseGenerator,
    f: &(dyn BooleanFn + Sync),
) -> Result<f64, PrimitiveError> {
    let bits = g.seed_length_bits();
    if bits as u32 > EXHAUSTIVE_SEED_BUDGET_BITS {
        return Err(PrimitiveError::SeedSpaceTooLarge {
            bits,
            budget: EXHAUSTIVE_SEED_BUDGET_BITS,
        });
    }
    let total = 1u64 << bits;
    let count = count_over_seed_range(g, f, 0, total)?;
    Ok(count as f64 / total as f64)
}

fn count_over_seed_range(
    g: &BaseGenerator,
    f: &(dyn BooleanFn + Sync),
    start: u64,
    end: u64,
) -> Result<u64, PrimitiveError> {
    let bits = g.seed_length_bits();
    let mut count = 0u64;
    for idx in start..end {
        let x = g.expand(&seed_from_index(bits, idx))?;
        if f.eval(&x) {
            count += 1;
        }
    }
    Ok(count)
}

/// Exact bias of `g` against `f` by full enumeration of both sides.
pub fn bias_exhaustive(
    g: &BaseGenerator,
    f: &(dyn BooleanFn + Sync),
) -> Result<f64, PrimitiveError> {
    if f.dimension() > 26 {
        return Err(PrimitiveError::InputSpaceTooLarge { n: f.dimension() });
    }
    let uniform = expectation_uniform(f);
    let seeded = expectation_over_seeds_dispatch(g, f)?;
    Ok((seeded - uniform).abs())
}

/// Sequential form of [`bias_exhaustive`], kept for benchmarking.
pub fn bias_exhaustive_seq(
    g: &BaseGenerator,
    f: &(dyn BooleanFn + Sync),
) -> Result<f64, PrimitiveError> {
    if f.dimension() > 26 {
        return Err(PrimitiveError::InputSpaceTooLarge { n: f.dimension() });
    }
    let uniform = expectation_uniform(f);
    let seeded = expectation_over_seeds(g, f)?;
    Ok((seeded - uniform).abs())
}

#[cfg(feature = "parallel")]
fn expectation_over_seeds_dispatch(
    g: &BaseGenerator,
    f: &(dyn BooleanFn + Sync),
) -> Result<f64, PrimitiveError> {
    use rayon::prelude::*;
    let bits = g.seed_length_bits();
    if bits as u32 > EXHAUSTIVE_SEED_BUDGET_BITS {
        return Err(PrimitiveError::SeedSpaceTooLarge {
            bits,
            budget: EXHAUSTIVE_SEED_BUDGET_BITS,
        });
    }
    let total = 1u64 << bits;
    if total < 1 << 12 {
        return expectation_over_seeds(g, f);
    }
    let chunk = 1u64 << 10;
    let count: Result<u64, PrimitiveError> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| count_over_seed_range(g, f, c * chunk, ((c + 1) * chunk).min(total)))
        .try_reduce(|| 0, |a, b| Ok(a + b));
    Ok(count? as f64 / total as f64)
}

#[cfg(not(feature = "parallel"))]
fn expectation_over_seeds_dispatch(
    g: &BaseGenerator,
    f: &(dyn BooleanFn + Sync),
) -> Result<f64, PrimitiveError> {
    expectation_over_seeds(g, f)
}
