//! k-wise independent hash functions and bounded subset samplers.
//!
//! The hash evaluates a degree-(k-1) polynomial with seed-supplied
//! coefficients over GF(2^b) and truncates the output to the low bits; when
//! the range is a power of two dividing 2^b this gives *exact* k-wise
//! independence: any k distinct inputs receive jointly uniform buckets over a
//! uniform seed. Subset samplers take the preimage of bucket 0 of a hash into
//! `[1/p]`, which is k-wise p-bounded with equality.

use prg_core::VarSet;
use serde::{Deserialize, Serialize};

use crate::field::BinaryField;
use crate::seed::SeedReader;
use crate::PrimitiveError;

/// A polynomial hash over GF(2^b) with `k`-wise independent outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KwiseHash {
    field: BinaryField,
    coeffs: Vec<u32>,
    domain: usize,
    range: usize,
}

impl KwiseHash {
    /// Seed bits needed for independence `k` at field degree `b`.
    pub fn seed_bits(k: usize, b: u32) -> usize {
        k * b as usize
    }

    /// Minimal field degree covering the domain and range.
    pub fn min_field_degree(domain: usize, range: usize) -> u32 {
        let need = domain.max(range).max(2);
        (usize::BITS - (need - 1).leading_zeros()).max(1)
    }

    /// Samples the hash from `seed` (consuming `k * b` bits big-endian) with
    /// the minimal field degree.
    pub fn sample(
        seed: &prg_core::BitString,
        domain: usize,
        range: usize,
        k: usize,
    ) -> Result<Self, PrimitiveError> {
        Self::sample_with_degree(seed, domain, range, k, Self::min_field_degree(domain, range))
    }

    /// Samples with an explicit field degree `b`; `2^b` must cover both the
    /// domain and the range, and the range must be a power of two.
    pub fn sample_with_degree(
        seed: &prg_core::BitString,
        domain: usize,
        range: usize,
        k: usize,
        b: u32,
    ) -> Result<Self, PrimitiveError> {
        if !range.is_power_of_two() {
            return Err(PrimitiveError::RangeNotPowerOfTwo { range });
        }
        let field = BinaryField::new(b)?;
        if (field.order() as usize) < domain || (field.order() as usize) < range {
            return Err(PrimitiveError::FieldTooSmall { b, domain, range });
        }
        let mut reader = SeedReader::expect_exact(seed, Self::seed_bits(k, b))?;
        let mut rd = move || reader.take_value(b);
        let coeffs = (0..k).map(|_| rd()).collect::<Result<Vec<_>, _>>()?;
        Ok(KwiseHash { field, coeffs, domain, range })
    }

    pub fn independence(&self) -> usize {
        self.coeffs.len()
    }

    pub fn field_degree(&self) -> u32 {
        self.field.degree()
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn range(&self) -> usize {
        self.range
    }

    /// Bucket of input `x` in `[0, range)`: the low bits of the field value.
    pub fn bucket(&self, x: usize) -> usize {
        debug_assert!(x < self.domain);
        let v = self.field.poly_eval(&self.coeffs, x as u32);
        (v & (self.range as u32 - 1)) as usize
    }

    /// The preimage of each bucket as an indicator set; always a partition of
    /// the domain.
    pub fn bucket_partition(&self, n: usize) -> Vec<VarSet> {
        let mut buckets = vec![VarSet::empty(n); self.range];
        for i in 0..n.min(self.domain) {
            buckets[self.bucket(i)].insert(i);
        }
        buckets
    }
}

/// A k-wise p-bounded subset sampler over `[n]` at a dyadic marginal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSampler {
    hash: KwiseHash,
    log2_inv_p: u32,
    independence: usize,
}

/// Dyadic marginal check: returns `j` with `p = 2^-j`.
pub fn dyadic_log2_inv(p: f64) -> Result<u32, PrimitiveError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(PrimitiveError::NonDyadicMarginal { p });
    }
    let j = (1.0 / p).log2().round() as u32;
    if (0.5f64.powi(j as i32) - p).abs() > 1e-12 {
        return Err(PrimitiveError::NonDyadicMarginal { p });
    }
    Ok(j)
}

impl SubsetSampler {
    pub fn seed_bits(n: usize, p: f64, k: usize) -> Result<usize, PrimitiveError> {
        let j = dyadic_log2_inv(p)?;
        let b = KwiseHash::min_field_degree(n, 1usize << j);
        Ok(KwiseHash::seed_bits(k, b))
    }

    pub fn sample(
        seed: &prg_core::BitString,
        n: usize,
        p: f64,
        k: usize,
    ) -> Result<Self, PrimitiveError> {
        let j = dyadic_log2_inv(p)?;
        let hash = KwiseHash::sample(seed, n, 1usize << j, k)?;
        Ok(SubsetSampler { hash, log2_inv_p: j, independence: k })
    }

    pub fn marginal(&self) -> f64 {
        0.5f64.powi(self.log2_inv_p as i32)
    }

    pub fn independence(&self) -> usize {
        self.independence
    }

    /// The sampled set: inputs hashing to bucket 0.
    pub fn set(&self) -> VarSet {
        let n = self.hash.domain();
        VarSet::from_indices(n, (0..n).filter(|&i| self.hash.bucket(i) == 0))
            .expect("indices in range")
    }
}

/// Convenience form of the subset sampler.
pub fn kwise_subset(
    seed: &prg_core::BitString,
    n: usize,
    p: f64,
    k: usize,
) -> Result<VarSet, PrimitiveError> {
    Ok(SubsetSampler::sample(seed, n, p, k)?.set())
}

/// Descriptor for a subset distribution in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SubsetDist {
    /// Each index kept independently with probability `p`.
    TrulyRandom { p: f64 },
    /// k-wise p-bounded sampler at a dyadic `p`.
    Kwise { p: f64, independence: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use prg_core::BitString;

    fn all_seeds(bits: usize) -> impl Iterator<Item = BitString> {
        (0..(1u64 << bits)).map(move |v| BitString::from_fn(bits, |i| (v >> (bits - 1 - i)) & 1 == 1))
    }

    #[test]
    fn deterministic_expansion() {
        let seed = BitString::parse_binary("101011").unwrap();
        let h1 = KwiseHash::sample_with_degree(&seed, 8, 2, 2, 3).unwrap();
        let h2 = KwiseHash::sample_with_degree(&seed, 8, 2, 2, 3).unwrap();
        for x in 0..8 {
            assert_eq!(h1.bucket(x), h2.bucket(x));
        }
    }

    #[test]
    fn one_wise_uniform_marginal() {
        // k = 1, b = 3, range 8: each input's bucket is uniform over seeds.
        let mut counts = vec![vec![0u32; 8]; 5];
        for seed in all_seeds(3) {
            let h = KwiseHash::sample_with_degree(&seed, 5, 8, 1, 3).unwrap();
            for (x, c) in counts.iter_mut().enumerate() {
                c[h.bucket(x)] += 1;
            }
        }
        for c in &counts {
            assert!(c.iter().all(|&v| v == 1), "{c:?}");
        }
    }

    #[test]
    fn pairwise_exact_independence() {
        // k = 2, b = 2, range 4: joint bucket distribution of any two
        // distinct inputs is exactly uniform over the 16 seeds.
        let n = 4usize;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let mut joint = vec![0u32; 16];
                for seed in all_seeds(4) {
                    let h = KwiseHash::sample_with_degree(&seed, n, 4, 2, 2).unwrap();
                    joint[h.bucket(a) * 4 + h.bucket(b)] += 1;
                }
                assert!(joint.iter().all(|&v| v == 1), "a={a} b={b}: {joint:?}");
            }
        }
    }

    #[test]
    fn range_must_be_power_of_two() {
        let seed = BitString::zeros(6);
        assert_eq!(
            KwiseHash::sample_with_degree(&seed, 4, 3, 2, 3).unwrap_err(),
            PrimitiveError::RangeNotPowerOfTwo { range: 3 }
        );
    }

    #[test]
    fn buckets_partition_domain() {
        for v in 0..64u64 {
            let seed = BitString::from_u64(6, v);
            let h = KwiseHash::sample_with_degree(&seed, 7, 4, 2, 3).unwrap();
            let parts = h.bucket_partition(7);
            let total: usize = parts.iter().map(VarSet::len).sum();
            assert_eq!(total, 7);
            for i in 0..7 {
                assert_eq!(parts.iter().filter(|p| p.contains(i)).count(), 1);
            }
        }
    }

    #[test]
    fn subset_marginal_exact() {
        // p = 1/2, k = 2, b = 3: count membership over all 64 seeds.
        let n = 6usize;
        let mut member = vec![0u32; n];
        let mut seeds = 0u32;
        for seed in all_seeds(6) {
            let set = kwise_subset(&seed, n, 0.5, 2).unwrap();
            for (i, m) in member.iter_mut().enumerate() {
                if set.contains(i) {
                    *m += 1;
                }
            }
            seeds += 1;
        }
        for &m in &member {
            assert_eq!(m * 2, seeds);
        }
    }

    #[test]
    fn subset_pair_boundedness_exact() {
        // Pr[{a,b} ⊆ Λ] = p² exactly for p = 1/2, checked over all seeds.
        let n = 5usize;
        let mut seeds = 0u32;
        let mut pair = vec![0u32; n * n];
        for seed in all_seeds(6) {
            let set = kwise_subset(&seed, n, 0.5, 2).unwrap();
            for a in 0..n {
                for b in 0..n {
                    if a != b && set.contains(a) && set.contains(b) {
                        pair[a * n + b] += 1;
                    }
                }
            }
            seeds += 1;
        }
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    assert_eq!(pair[a * n + b] * 4, seeds, "pair ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn full_marginal_takes_everything() {
        let seed = BitString::zeros(0);
        let set = kwise_subset(&seed, 9, 1.0, 0).unwrap();
        assert_eq!(set.len(), 9);
    }

    #[test]
    fn non_dyadic_rejected() {
        let seed = BitString::zeros(6);
        assert!(matches!(
            kwise_subset(&seed, 4, 0.3, 2),
            Err(PrimitiveError::NonDyadicMarginal { .. })
        ));
    }
}
