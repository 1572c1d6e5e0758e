//! Pseudorandom primitives and the partition-based generator composer.
//!
//! - [`field`]: arithmetic in binary extension fields with fixed irreducible
//!   polynomials, the base of all hash constructions.
//! - [`hash`]: k-wise independent hash functions and k-wise p-bounded subset
//!   samplers.
//! - [`basegen`]: pluggable bounded-independence / small-bias / uniform base
//!   generators with declared fooling claims.
//! - [`bias`]: exhaustive bias measurement of a generator against a circuit.
//! - [`composer`]: the partition-based composed generator, its hybrid
//!   distributions, seed layout and seed-length accounting.

pub mod basegen;
pub mod bias;
pub mod composer;
pub mod field;
pub mod hash;
pub mod seed;

pub use basegen::{BaseGenerator, FoolingClaim};
pub use bias::{bias_exhaustive, bias_exhaustive_seq, expectation_over_seeds};
pub use composer::{
    derive_schedule, ComposedGenerator, ComposerError, GeneratorSpec, PartitionNode, Schedule,
    SeedLayout,
};
pub use field::BinaryField;
pub use hash::{kwise_subset, KwiseHash, SubsetSampler};
pub use seed::SeedReader;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PrimitiveError {
    #[error("range {range} is not a power of two")]
    RangeNotPowerOfTwo { range: usize },
    #[error("marginal {p} is not of the form 2^-j")]
    NonDyadicMarginal { p: f64 },
    #[error("field degree {b} cannot cover domain {domain} and range {range}")]
    FieldTooSmall { b: u32, domain: usize, range: usize },
    #[error("field degree {0} unsupported (1..=16)")]
    UnsupportedFieldDegree(u32),
    #[error("seed has {got} bits, expected {expected}")]
    SeedLength { got: usize, expected: usize },
    #[error("generator dimensions disagree: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("seed space of {bits} bits exceeds the exhaustive budget of {budget} bits")]
    SeedSpaceTooLarge { bits: usize, budget: u32 },
    #[error("input dimension {n} exceeds the exhaustive truth budget")]
    InputSpaceTooLarge { n: usize },
}
