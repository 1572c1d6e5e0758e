//! Pluggable base generators.
//!
//! These stand in for the depth-2 generator at the recursion's base:
//!
//! - `kwise`: an exactly k-wise independent bit string (polynomial hash into
//!   range 2), zero bias against any function of at most k variables;
//! - `small-bias`: the inner-product powering construction over GF(2^b),
//!   parity bias at most `(n - 1) / 2^b`;
//! - `xor`: coordinate-wise XOR of two generators;
//! - `uniform`: the identity on an n-bit seed, the truth reference.
//!
//! Every generator is a total deterministic function of its seed.

use prg_core::BitString;
use serde::{Deserialize, Serialize};

use crate::field::BinaryField;
use crate::hash::KwiseHash;
use crate::seed::SeedReader;
use crate::PrimitiveError;

/// What a generator claims to fool, carried into experiment reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoolingClaim {
    pub description: String,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum BaseGenerator {
    /// Exactly k-wise independent bits.
    Kwise {
        n: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field_degree: Option<u32>,
    },
    /// Inner-product powering construction with field degree `field_degree`.
    SmallBias { n: usize, field_degree: u32 },
    /// XOR of two generators of the same dimension.
    Xor { a: Box<BaseGenerator>, b: Box<BaseGenerator> },
    /// The seed itself.
    Uniform { n: usize },
}

impl BaseGenerator {
    pub fn dimension(&self) -> usize {
        match self {
            BaseGenerator::Kwise { n, .. }
            | BaseGenerator::SmallBias { n, .. }
            | BaseGenerator::Uniform { n } => *n,
            BaseGenerator::Xor { a, .. } => a.dimension(),
        }
    }

    fn kwise_degree(n: usize, field_degree: Option<u32>) -> u32 {
        field_degree.unwrap_or_else(|| KwiseHash::min_field_degree(n, 2))
    }

    pub fn seed_length_bits(&self) -> usize {
        match self {
            BaseGenerator::Kwise { n, k, field_degree } => {
                KwiseHash::seed_bits(*k, Self::kwise_degree(*n, *field_degree))
            }
            BaseGenerator::SmallBias { field_degree, .. } => 2 * *field_degree as usize,
            BaseGenerator::Xor { a, b } => a.seed_length_bits() + b.seed_length_bits(),
            BaseGenerator::Uniform { n } => *n,
        }
    }

    pub fn validate(&self) -> Result<(), PrimitiveError> {
        match self {
            BaseGenerator::Kwise { n, k, field_degree } => {
                let b = Self::kwise_degree(*n, *field_degree);
                let seed = BitString::zeros(KwiseHash::seed_bits(*k, b));
                KwiseHash::sample_with_degree(&seed, *n, 2, *k, b).map(|_| ())
            }
            BaseGenerator::SmallBias { field_degree, .. } => {
                BinaryField::new(*field_degree).map(|_| ())
            }
            BaseGenerator::Xor { a, b } => {
                a.validate()?;
                b.validate()?;
                if a.dimension() != b.dimension() {
                    return Err(PrimitiveError::DimensionMismatch {
                        left: a.dimension(),
                        right: b.dimension(),
                    });
                }
                Ok(())
            }
            BaseGenerator::Uniform { .. } => Ok(()),
        }
    }

    /// Expands a seed of exactly `seed_length_bits` into an n-bit string.
    pub fn expand(&self, seed: &BitString) -> Result<BitString, PrimitiveError> {
        if seed.len() != self.seed_length_bits() {
            return Err(PrimitiveError::SeedLength {
                got: seed.len(),
                expected: self.seed_length_bits(),
            });
        }
        match self {
            BaseGenerator::Kwise { n, k, field_degree } => {
                let b = Self::kwise_degree(*n, *field_degree);
                let h = KwiseHash::sample_with_degree(seed, *n, 2, *k, b)?;
                Ok(BitString::from_fn(*n, |i| h.bucket(i) == 1))
            }
            BaseGenerator::SmallBias { n, field_degree } => {
                let field = BinaryField::new(*field_degree)?;
                let mut reader = SeedReader::new(seed);
                let a = reader.take_value(*field_degree)?;
                let r = reader.take_value(*field_degree)?;
                // Bit i is the GF(2) inner product <a, r^i>.
                let mut power = 1u32;
                Ok(BitString::from_fn(*n, |_| {
                    let bit = (a & power).count_ones() % 2 == 1;
                    power = field.mul(power, r);
                    bit
                }))
            }
            BaseGenerator::Xor { a, b } => {
                let mut reader = SeedReader::new(seed);
                let sa = reader.take_slice(a.seed_length_bits())?;
                let sb = reader.take_slice(b.seed_length_bits())?;
                if a.dimension() != b.dimension() {
                    return Err(PrimitiveError::DimensionMismatch {
                        left: a.dimension(),
                        right: b.dimension(),
                    });
                }
                let mut xa = a.expand(&sa)?;
                let xb = b.expand(&sb)?;
                xa.xor_assign(&xb);
                Ok(xa)
            }
            BaseGenerator::Uniform { .. } => Ok(seed.clone()),
        }
    }

    pub fn claim(&self) -> FoolingClaim {
        match self {
            BaseGenerator::Kwise { k, .. } => FoolingClaim {
                description: format!("functions of at most {k} variables"),
                epsilon: 0.0,
            },
            BaseGenerator::SmallBias { n, field_degree } => FoolingClaim {
                description: "parities".to_string(),
                epsilon: (*n as f64 - 1.0) / (1u64 << *field_degree) as f64,
            },
            BaseGenerator::Xor { a, b } => {
                let (ca, cb) = (a.claim(), b.claim());
                FoolingClaim {
                    description: format!("xor of [{}] and [{}]", ca.description, cb.description),
                    epsilon: ca.epsilon.min(cb.epsilon),
                }
            }
            BaseGenerator::Uniform { .. } => {
                FoolingClaim { description: "everything (truly uniform)".to_string(), epsilon: 0.0 }
            }
        }
    }
}
