//! Parallel vs sequential throughput of the hot loops. Run with
//! `cargo bench -p prg-lab`; the parallel variants use the rayon pool, the
//! `/seq` variants run the identical block bodies in order.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use prg_lab::config::{CircuitSuite, FoolingConfig, GeneratorConfig, LambdaDist, SwitchConfig, XDist};
use prg_lab::experiments::{run_fooling, run_fooling_seq, run_switching, run_switching_seq};
use prg_rand::{bias_exhaustive, bias_exhaustive_seq, BaseGenerator};

fn switch_cfg(samples: u64) -> SwitchConfig {
    SwitchConfig {
        label: None,
        n: 14,
        m_terms: 8,
        k: 2,
        formula_count: 8,
        p: 1.0 / 32.0,
        t: 3,
        samples,
        seed: 11,
        lambda: LambdaDist::TrulyRandom,
        x: XDist::Uniform,
        epsilon_term: 0.0,
        confidence: 0.99,
    }
}

fn bench_switching(c: &mut Criterion) {
    let mut group = c.benchmark_group("switching-estimate");
    for samples in [2_000u64, 8_000] {
        let cfg = switch_cfg(samples);
        group.bench_with_input(BenchmarkId::new("parallel", samples), &cfg, |b, cfg| {
            b.iter(|| run_switching(cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", samples), &cfg, |b, cfg| {
            b.iter(|| run_switching_seq(cfg).unwrap())
        });
    }
    group.finish();
}

fn fooling_cfg(samples: u64) -> FoolingConfig {
    FoolingConfig {
        label: None,
        generator: GeneratorConfig::Base {
            generator: BaseGenerator::Kwise { n: 12, k: 6, field_degree: Some(4) },
        },
        circuits: CircuitSuite {
            n: 12,
            enumerated_terms: 12,
            random_depth3: 20,
            adversarial: true,
            circuit_seed: 3,
        },
        epsilon: 0.1,
        seed_samples: Some(samples),
        seed: 17,
        confidence: 0.99,
    }
}

fn bench_fooling(c: &mut Criterion) {
    let mut group = c.benchmark_group("fooling-estimate");
    for samples in [4_000u64, 16_000] {
        let cfg = fooling_cfg(samples);
        group.bench_with_input(BenchmarkId::new("parallel", samples), &cfg, |b, cfg| {
            b.iter(|| run_fooling(cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", samples), &cfg, |b, cfg| {
            b.iter(|| run_fooling_seq(cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_bias_enumeration(c: &mut Criterion) {
    use prg_core::{DnfFormula, Literal, Term};
    let g = BaseGenerator::SmallBias { n: 16, field_degree: 9 };
    let term = Term::new(vec![
        Literal { var: 0, negated: false },
        Literal { var: 7, negated: true },
        Literal { var: 13, negated: false },
    ])
    .unwrap();
    let f = DnfFormula::new(16, vec![term]).unwrap();
    let mut group = c.benchmark_group("bias-enumeration");
    group.bench_function("parallel", |b| b.iter(|| bias_exhaustive(&g, &f).unwrap()));
    group.bench_function("sequential", |b| b.iter(|| bias_exhaustive_seq(&g, &f).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_switching, bench_fooling, bench_bias_enumeration);
criterion_main!(benches);
