//! Experiment harness around the restriction/witness core and the generator
//! composer: Monte-Carlo switching-lemma experiments with exact binomial
//! confidence intervals, exact searcher-probability checks, and fooling
//! tests, all reproducible bit-for-bit from (config, seed).

pub mod bounds;
pub mod ci;
pub mod config;
pub mod experiments;
pub mod report;
pub mod sample;
pub mod stream;

pub use bounds::{multi_switching_bound, switching_bound};
pub use ci::clopper_pearson;
pub use config::{
    CircuitSuite, ExperimentConfig, FoolingConfig, GeneratorConfig, LambdaDist,
    MultiSwitchConfig, SearcherConfig, SwitchConfig, XDist,
};
pub use experiments::{run_experiment, run_fooling, run_multi_switching, run_searcher, run_switching};
pub use report::{ExperimentReport, Stamp, Verdict};
