//! Experiment configurations (JSON).

use prg_rand::{BaseGenerator, ComposedGenerator};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Switch(SwitchConfig),
    MultiSwitch(MultiSwitchConfig),
    Searcher(SearcherConfig),
    Fooling(FoolingConfig),
}

impl ExperimentConfig {
    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::Switch(c) => c.seed,
            ExperimentConfig::MultiSwitch(c) => c.seed,
            ExperimentConfig::Searcher(c) => c.seed,
            ExperimentConfig::Fooling(c) => c.seed,
        }
    }
}

/// Distribution of the star set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum LambdaDist {
    /// Independent per-coordinate stars.
    #[default]
    TrulyRandom,
    /// k-wise bounded subset sampler (requires a dyadic marginal).
    Kwise { independence: usize },
}

/// Distribution of the fixed part of the restriction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum XDist {
    #[default]
    Uniform,
    Base { generator: BaseGenerator },
}

fn default_formula_count() -> usize {
    1
}

fn default_confidence() -> f64 {
    0.99
}

/// Single-formula switching experiment: estimate
/// `Pr[DT(F restricted) > t]` and compare against the closed-form bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchConfig {
    #[serde(default)]
    pub label: Option<String>,
    pub n: usize,
    pub m_terms: usize,
    pub k: usize,
    /// How many random formulas the samples rotate through.
    #[serde(default = "default_formula_count")]
    pub formula_count: usize,
    /// Star marginal.
    pub p: f64,
    pub t: usize,
    pub samples: u64,
    pub seed: u64,
    #[serde(default)]
    pub lambda: LambdaDist,
    #[serde(default)]
    pub x: XDist,
    /// The eps in the bound's additive term (0 for a truly random string).
    #[serde(default)]
    pub epsilon_term: f64,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

/// Family (multi-switching) experiment: estimate the probability that the
/// restricted family has no w-partial depth-t decision tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSwitchConfig {
    #[serde(default)]
    pub label: Option<String>,
    pub n: usize,
    /// Family size (number of DNFs).
    pub m_formulas: usize,
    /// Terms per DNF.
    pub m_terms: usize,
    pub k: usize,
    pub w: usize,
    pub p: f64,
    pub t: usize,
    pub samples: u64,
    pub seed: u64,
    #[serde(default)]
    pub lambda: LambdaDist,
    #[serde(default)]
    pub x: XDist,
    #[serde(default)]
    pub epsilon_term: f64,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

/// Exact searcher-probability check over the full advice space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearcherConfig {
    #[serde(default)]
    pub label: Option<String>,
    pub n: usize,
    pub m_terms: usize,
    pub k: usize,
    pub t: usize,
    /// Star-set density used when sampling instances.
    pub star_p: f64,
    pub instances: u64,
    pub seed: u64,
    /// When set, checks global instances with these parameters instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global: Option<GlobalSearcherParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalSearcherParams {
    pub family_size: usize,
    pub w: usize,
}

/// The generator under test in a fooling experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GeneratorConfig {
    Base { generator: BaseGenerator },
    Composed { generator: ComposedGenerator },
    /// Hybrid distribution of a composed generator: the first `index` child
    /// strings are replaced by fresh uniform bits.
    Hybrid { generator: ComposedGenerator, index: usize },
}

impl GeneratorConfig {
    pub fn dimension(&self) -> usize {
        match self {
            GeneratorConfig::Base { generator } => generator.dimension(),
            GeneratorConfig::Composed { generator } | GeneratorConfig::Hybrid { generator, .. } => {
                generator.dimension()
            }
        }
    }
}

/// The distinguisher suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSuite {
    pub n: usize,
    /// Number of enumerated width-2 terms to include (taken in index order).
    #[serde(default)]
    pub enumerated_terms: usize,
    /// Number of random depth-3 circuits.
    #[serde(default)]
    pub random_depth3: usize,
    /// Include the fixed adversarial circuits.
    #[serde(default)]
    pub adversarial: bool,
    /// Seed for the random circuits.
    #[serde(default)]
    pub circuit_seed: u64,
}

/// Fooling experiment: max bias of the generator against the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoolingConfig {
    #[serde(default)]
    pub label: Option<String>,
    pub generator: GeneratorConfig,
    pub circuits: CircuitSuite,
    /// Verdict threshold: max measured bias (upper 99% limit) must be <= eps.
    pub epsilon: f64,
    /// Monte-Carlo seed-sample count; omit to require exhaustive seeds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_samples: Option<u64>,
    pub seed: u64,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}
