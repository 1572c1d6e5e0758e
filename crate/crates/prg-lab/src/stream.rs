//! Deterministic RNG streams for sharded sample loops.
//!
//! Samples are processed in fixed-size blocks; every block derives its own
//! counter-based RNG streams from (seed, block index, channel). Results are
//! integer counters merged by addition, so the outcome is identical for any
//! worker count, and paired experiments reuse a channel (e.g. the restriction
//! set) while varying another.

use prg_core::BitString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub const SAMPLES_PER_BLOCK: u64 = 512;

/// RNG channels within a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Lambda = 0,
    XString = 1,
    Instance = 2,
    Tape = 3,
}

const CHANNELS: u64 = 8;

/// The RNG for one (block, channel) pair.
pub fn block_rng(seed: u64, block: u64, channel: Channel) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(block * CHANNELS + channel as u64 + 1);
    rng
}

/// Dedicated stream for one-off setup draws (formula generation).
pub fn setup_rng(seed: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

pub fn random_bits(rng: &mut impl Rng, n: usize) -> BitString {
    BitString::from_fn(n, |_| rng.random::<bool>())
}

/// Runs `body` over all blocks covering `total` samples and sums the
/// per-block counter vectors. The parallel and sequential paths produce
/// identical results.
pub fn blockwise_counts<F>(total: u64, width: usize, body: F) -> Vec<u64>
where
    F: Fn(u64, std::ops::Range<u64>) -> Vec<u64> + Sync,
{
    let blocks = total.div_ceil(SAMPLES_PER_BLOCK);
    let run_block = |b: u64| {
        let lo = b * SAMPLES_PER_BLOCK;
        let hi = ((b + 1) * SAMPLES_PER_BLOCK).min(total);
        body(b, lo..hi)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        return (0..blocks)
            .into_par_iter()
            .map(run_block)
            .reduce(|| vec![0u64; width], merge);
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..blocks).map(run_block).fold(vec![0u64; width], merge)
    }
}

/// Sequential twin of [`blockwise_counts`], kept callable with the parallel
/// feature on for benchmarking.
pub fn blockwise_counts_seq<F>(total: u64, width: usize, body: F) -> Vec<u64>
where
    F: Fn(u64, std::ops::Range<u64>) -> Vec<u64>,
{
    let blocks = total.div_ceil(SAMPLES_PER_BLOCK);
    (0..blocks)
        .map(|b| {
            let lo = b * SAMPLES_PER_BLOCK;
            let hi = ((b + 1) * SAMPLES_PER_BLOCK).min(total);
            body(b, lo..hi)
        })
        .fold(vec![0u64; width], merge)
}

fn merge(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    if a.is_empty() {
        return b;
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}
