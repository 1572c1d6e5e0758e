//! The experiment runners.
//!
//! Every runner follows the same shape: pre-generate fixed material from the
//! setup stream, fan the sample loop out over fixed-size blocks with
//! per-block RNG streams, merge integer counters, and derive the report. The
//! sequential `*_seq` twins run the same blocks in order and produce
//! identical reports.

use anyhow::{ensure, Context, Result};
use prg_core::{
    complete_partial_witness, global_witness_search, witness_search, Ac0Circuit, BitString,
    BooleanFn, DnfFormula, DtOracle, FamilyDtOracle, Gate, GateInput, GateKind, Literal,
    Restriction, Term, VarSet,
};
use prg_rand::{bias::EXHAUSTIVE_SEED_BUDGET_BITS, kwise_subset, SubsetSampler};
use rand::Rng;
use serde_json::json;

use crate::bounds::{informative, multi_switching_bound, switching_bound};
use crate::ci::clopper_pearson;
use crate::config::{
    CircuitSuite, ExperimentConfig, FoolingConfig, GeneratorConfig, LambdaDist,
    MultiSwitchConfig, SearcherConfig, SwitchConfig, XDist,
};
use crate::report::{ExperimentReport, Stamp, Verdict};
use crate::sample::{
    random_family, random_global_instance, random_kdnf, random_witness_instance, retry,
    truly_random_subset,
};
use crate::stream::{block_rng, blockwise_counts, blockwise_counts_seq, random_bits, setup_rng, Channel};

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg {
        ExperimentConfig::Switch(c) => run_switching(c),
        ExperimentConfig::MultiSwitch(c) => run_multi_switching(c),
        ExperimentConfig::Searcher(c) => run_searcher(c),
        ExperimentConfig::Fooling(c) => run_fooling(c),
    }
}

fn draw_lambda(rng: &mut impl Rng, dist: &LambdaDist, n: usize, p: f64) -> VarSet {
    match dist {
        LambdaDist::TrulyRandom => truly_random_subset(rng, n, p),
        LambdaDist::Kwise { independence } => {
            let bits = SubsetSampler::seed_bits(n, p, *independence)
                .expect("dyadic marginal validated");
            let seed = random_bits(rng, bits);
            kwise_subset(&seed, n, p, *independence).expect("validated")
        }
    }
}

fn draw_x(rng: &mut impl Rng, dist: &XDist, n: usize) -> BitString {
    match dist {
        XDist::Uniform => random_bits(rng, n),
        XDist::Base { generator } => {
            let seed = random_bits(rng, generator.seed_length_bits());
            generator.expand(&seed).expect("validated")
        }
    }
}

fn validate_lambda(dist: &LambdaDist, n: usize, p: f64) -> Result<()> {
    if let LambdaDist::Kwise { independence } = dist {
        SubsetSampler::seed_bits(n, p, *independence)
            .context("k-wise star sets need a dyadic marginal")?;
    }
    ensure!(p > 0.0 && p < 1.0 || p == 1.0, "marginal p must lie in (0, 1]");
    Ok(())
}

fn validate_x(dist: &XDist, n: usize) -> Result<()> {
    if let XDist::Base { generator } = dist {
        generator.validate()?;
        ensure!(generator.dimension() == n, "x generator dimension must be n");
    }
    Ok(())
}

// ---------------------------------------------------------------- switching

pub fn run_switching(cfg: &SwitchConfig) -> Result<ExperimentReport> {
    run_switching_impl(cfg, false)
}

/// Sequential twin of [`run_switching`]; identical output.
pub fn run_switching_seq(cfg: &SwitchConfig) -> Result<ExperimentReport> {
    run_switching_impl(cfg, true)
}

fn run_switching_impl(cfg: &SwitchConfig, force_seq: bool) -> Result<ExperimentReport> {
    ensure!(cfg.n <= 16, "exact DT oracle capped at n = 16");
    ensure!(cfg.samples > 0, "need at least one sample");
    ensure!(cfg.formula_count > 0, "need at least one formula");
    validate_lambda(&cfg.lambda, cfg.n, cfg.p)?;
    validate_x(&cfg.x, cfg.n)?;
    let mut setup = setup_rng(cfg.seed);
    let formulas: Vec<DnfFormula> = (0..cfg.formula_count)
        .map(|_| random_kdnf(&mut setup, cfg.n, cfg.m_terms, cfg.k))
        .collect();
    let body = |b: u64, range: std::ops::Range<u64>| {
        let mut rng_l = block_rng(cfg.seed, b, Channel::Lambda);
        let mut rng_x = block_rng(cfg.seed, b, Channel::XString);
        let mut dt = DtOracle::new(16);
        let mut failures = 0u64;
        let mut total = 0u64;
        for s in range {
            let lambda = draw_lambda(&mut rng_l, &cfg.lambda, cfg.n, cfg.p);
            let x = draw_x(&mut rng_x, &cfg.x, cfg.n);
            let rho = Restriction::fix_outside(&lambda, &x).expect("same dimension");
            let f = &formulas[(s % cfg.formula_count as u64) as usize];
            let depth = dt.depth_of_restricted(f, &rho).expect("n within cap");
            if depth > cfg.t {
                failures += 1;
            }
            total += 1;
        }
        vec![failures, total]
    };
    let counts = if force_seq {
        blockwise_counts_seq(cfg.samples, 2, body)
    } else {
        blockwise_counts(cfg.samples, 2, body)
    };
    let (failures, total) = (counts[0], counts[1]);
    let bound = switching_bound(cfg.k, cfg.p, cfg.t, cfg.m_terms, cfg.epsilon_term);
    let ci = clopper_pearson(failures, total, cfg.confidence);
    let verdict = if ci.1 <= bound { Verdict::Pass } else { Verdict::Fail };
    Ok(ExperimentReport {
        experiment: "switch".into(),
        label: cfg.label.clone().unwrap_or_else(|| {
            format!("n{} m{} k{} p{} t{}", cfg.n, cfg.m_terms, cfg.k, cfg.p, cfg.t)
        }),
        numerator: failures,
        denominator: total,
        p_hat: failures as f64 / total as f64,
        ci99: [ci.0, ci.1],
        bound: Some(bound),
        informative: Some(informative(bound)),
        verdict,
        stamp: Stamp::new(serde_json::to_value(cfg)?),
        details: serde_json::Value::Null,
    })
}

// ----------------------------------------------------------- multi-switching

pub fn run_multi_switching(cfg: &MultiSwitchConfig) -> Result<ExperimentReport> {
    run_multi_switching_impl(cfg, false)
}

pub fn run_multi_switching_seq(cfg: &MultiSwitchConfig) -> Result<ExperimentReport> {
    run_multi_switching_impl(cfg, true)
}

fn run_multi_switching_impl(cfg: &MultiSwitchConfig, force_seq: bool) -> Result<ExperimentReport> {
    ensure!(cfg.n <= prg_core::partial::DEFAULT_FAMILY_DIM_CAP, "family oracle capped at n = 12");
    ensure!(cfg.t <= cfg.n, "budget t cannot exceed n");
    ensure!(cfg.w >= 1, "width w must be positive");
    ensure!(cfg.samples > 0, "need at least one sample");
    validate_lambda(&cfg.lambda, cfg.n, cfg.p)?;
    validate_x(&cfg.x, cfg.n)?;
    let mut setup = setup_rng(cfg.seed);
    let family = random_family(&mut setup, cfg.n, cfg.m_formulas, cfg.m_terms, cfg.k);
    let body = |b: u64, range: std::ops::Range<u64>| {
        let mut rng_l = block_rng(cfg.seed, b, Channel::Lambda);
        let mut rng_x = block_rng(cfg.seed, b, Channel::XString);
        let mut oracle = FamilyDtOracle::new(&family, cfg.w).expect("validated");
        let mut failures = 0u64;
        let mut total = 0u64;
        for _ in range {
            let lambda = draw_lambda(&mut rng_l, &cfg.lambda, cfg.n, cfg.p);
            let x = draw_x(&mut rng_x, &cfg.x, cfg.n);
            let rho = Restriction::fix_outside(&lambda, &x).expect("same dimension");
            if !oracle.has_partial_dt(&rho, cfg.t).expect("validated") {
                failures += 1;
            }
            total += 1;
        }
        vec![failures, total]
    };
    let counts = if force_seq {
        blockwise_counts_seq(cfg.samples, 2, body)
    } else {
        blockwise_counts(cfg.samples, 2, body)
    };
    let (failures, total) = (counts[0], counts[1]);
    let bound =
        multi_switching_bound(cfg.m_formulas, cfg.t, cfg.w, cfg.p, cfg.k, cfg.epsilon_term);
    let ci = clopper_pearson(failures, total, cfg.confidence);
    let verdict = if ci.1 <= bound { Verdict::Pass } else { Verdict::Fail };
    Ok(ExperimentReport {
        experiment: "multi-switch".into(),
        label: cfg.label.clone().unwrap_or_else(|| {
            format!(
                "n{} fam{} m{} k{} w{} p{} t{}",
                cfg.n, cfg.m_formulas, cfg.m_terms, cfg.k, cfg.w, cfg.p, cfg.t
            )
        }),
        numerator: failures,
        denominator: total,
        p_hat: failures as f64 / total as f64,
        ci99: [ci.0, ci.1],
        bound: Some(bound),
        informative: Some(informative(bound)),
        verdict,
        stamp: Stamp::new(serde_json::to_value(cfg)?),
        details: serde_json::Value::Null,
    })
}

// ----------------------------------------------------------------- searcher

pub fn run_searcher(cfg: &SearcherConfig) -> Result<ExperimentReport> {
    ensure!(cfg.n <= 14, "exhaustive advice space capped at n = 14");
    ensure!(cfg.instances > 0, "need at least one instance");
    let width = 3; // [mismatches, generation failures, checked]
    let counts = blockwise_counts(cfg.instances, width, |b, range| {
        let mut mism = 0u64;
        let mut genfail = 0u64;
        let mut checked = 0u64;
        for idx in range {
            let _ = b;
            let mut rng = block_rng(cfg.seed, idx, Channel::Instance);
            let exact = match &cfg.global {
                None => single_instance_exact(cfg, &mut rng),
                Some(g) => global_instance_exact(cfg, g.family_size, g.w, &mut rng),
            };
            match exact {
                Some(true) => {}
                Some(false) => mism += 1,
                None => genfail += 1,
            }
            checked += 1;
        }
        vec![mism, genfail, checked]
    });
    let (mism, genfail, checked) = (counts[0], counts[1], counts[2]);
    let bad = mism + genfail;
    let verdict = if bad == 0 { Verdict::Pass } else { Verdict::Fail };
    Ok(ExperimentReport {
        experiment: if cfg.global.is_some() { "searcher-global".into() } else { "searcher".into() },
        label: cfg.label.clone().unwrap_or_else(|| {
            format!("n{} m{} k{} t{} x{}", cfg.n, cfg.m_terms, cfg.k, cfg.t, cfg.instances)
        }),
        numerator: bad,
        denominator: checked,
        p_hat: bad as f64 / checked as f64,
        ci99: [0.0, 0.0],
        bound: None,
        informative: None,
        verdict,
        stamp: Stamp::new(serde_json::to_value(cfg)?),
        details: json!({ "mismatches": mism, "generation_failures": genfail }),
    })
}

/// Counts, over all 2^n advice strings, how often the searcher reproduces the
/// unique completion, and compares with 2^(n-s) exactly.
fn single_instance_exact(cfg: &SearcherConfig, rng: &mut impl Rng) -> Option<bool> {
    let inst = retry(500, || {
        random_witness_instance(rng, cfg.n, cfg.m_terms, cfg.k, cfg.t, cfg.star_p)
    })?;
    let pw = inst.witness.to_partial();
    let expected = complete_partial_witness(&inst.formula, &inst.rho, &pw)
        .ok()
        .flatten()
        .expect("valid witness completes");
    debug_assert_eq!(expected, inst.witness);
    let s = pw.size();
    if s > cfg.n {
        return Some(false);
    }
    let mut successes = 0u64;
    for v in 0..(1u64 << cfg.n) {
        let y = BitString::from_u64(cfg.n, v);
        if witness_search(&inst.formula, &inst.rho, &pw, &y).as_ref() == Ok(&expected) {
            successes += 1;
        }
    }
    Some(successes == 1u64 << (cfg.n - s))
}

fn global_instance_exact(
    cfg: &SearcherConfig,
    family_size: usize,
    w: usize,
    rng: &mut impl Rng,
) -> Option<bool> {
    let inst = retry(500, || {
        random_global_instance(
            rng,
            cfg.n,
            family_size,
            cfg.m_terms,
            cfg.k,
            w,
            cfg.t,
            cfg.star_p,
        )
    })?;
    let gpw = inst.witness.to_partial();
    let total = inst.witness.size();
    if total > cfg.n {
        return Some(false);
    }
    let mut successes = 0u64;
    for v in 0..(1u64 << cfg.n) {
        let y = BitString::from_u64(cfg.n, v);
        if global_witness_search(&inst.family, &inst.rho, &gpw, &y).as_ref() == Ok(&inst.witness) {
            successes += 1;
        }
    }
    Some(successes == 1u64 << (cfg.n - total))
}

// ------------------------------------------------------------------ fooling

/// The circuit suite: enumerated small terms, random depth-3 circuits, and a
/// few fixed adversarial shapes.
pub fn build_suite(suite: &CircuitSuite) -> Vec<(String, Box<dyn BooleanFn + Sync>)> {
    let n = suite.n;
    let mut out: Vec<(String, Box<dyn BooleanFn + Sync>)> = Vec::new();
    let mut terms_taken = 0usize;
    'outer: for a in 0..n {
        for b in (a + 1)..n {
            for pol in 0..4u8 {
                if terms_taken >= suite.enumerated_terms {
                    break 'outer;
                }
                let lits = vec![
                    Literal { var: a, negated: pol & 1 == 1 },
                    Literal { var: b, negated: pol & 2 == 2 },
                ];
                let f = DnfFormula::new(n, vec![Term::new(lits).unwrap()]).unwrap();
                out.push((format!("term-{a}-{b}-{pol}"), Box::new(f)));
                terms_taken += 1;
            }
        }
    }
    let mut rng = setup_rng(suite.circuit_seed ^ 0x5u64);
    for i in 0..suite.random_depth3 {
        out.push((format!("rand3-{i}"), Box::new(random_depth3(&mut rng, n))));
    }
    if suite.adversarial {
        out.push(("tribes".into(), Box::new(tribes(n))));
        out.push(("co-tribes".into(), Box::new(co_tribes(n))));
        out.push(("mux".into(), Box::new(mux3(n))));
    }
    out
}

/// A random depth-3 alternating circuit: AND of ORs of small ANDs.
fn random_depth3(rng: &mut impl Rng, n: usize) -> Ac0Circuit {
    let mut gates: Vec<Gate> = Vec::new();
    let mut or_ids = Vec::new();
    let ors = rng.random_range(2..=3usize);
    for _ in 0..ors {
        let mut or_inputs = Vec::new();
        for _ in 0..rng.random_range(2..=3usize) {
            let width = rng.random_range(2..=3usize);
            let mut vars: Vec<usize> = (0..n).collect();
            use rand::seq::SliceRandom;
            vars.shuffle(rng);
            let inputs = vars[..width]
                .iter()
                .map(|&v| GateInput::Lit(Literal { var: v, negated: rng.random::<bool>() }))
                .collect();
            gates.push(Gate { kind: GateKind::And, inputs });
            or_inputs.push(GateInput::Gate(gates.len() - 1));
        }
        gates.push(Gate { kind: GateKind::Or, inputs: or_inputs });
        or_ids.push(GateInput::Gate(gates.len() - 1));
    }
    gates.push(Gate { kind: GateKind::And, inputs: or_ids });
    let output = gates.len() - 1;
    Ac0Circuit::new(n, gates, output).expect("alternating by construction")
}

/// OR of ANDs over consecutive disjoint triples.
fn tribes(n: usize) -> Ac0Circuit {
    let mut gates = Vec::new();
    let mut top = Vec::new();
    for chunk in (0..n).collect::<Vec<_>>().chunks(3) {
        if chunk.len() < 2 {
            continue;
        }
        gates.push(Gate {
            kind: GateKind::And,
            inputs: chunk.iter().map(|&v| GateInput::Lit(Literal::pos(v))).collect(),
        });
        top.push(GateInput::Gate(gates.len() - 1));
    }
    gates.push(Gate { kind: GateKind::Or, inputs: top });
    let output = gates.len() - 1;
    Ac0Circuit::new(n, gates, output).expect("valid")
}

/// AND of ORs over consecutive disjoint triples.
fn co_tribes(n: usize) -> Ac0Circuit {
    let mut gates = Vec::new();
    let mut top = Vec::new();
    for chunk in (0..n).collect::<Vec<_>>().chunks(3) {
        if chunk.len() < 2 {
            continue;
        }
        gates.push(Gate {
            kind: GateKind::Or,
            inputs: chunk.iter().map(|&v| GateInput::Lit(Literal::neg(v))).collect(),
        });
        top.push(GateInput::Gate(gates.len() - 1));
    }
    gates.push(Gate { kind: GateKind::And, inputs: top });
    let output = gates.len() - 1;
    Ac0Circuit::new(n, gates, output).expect("valid")
}

/// A selector: x0 chooses between two AND/OR branches.
fn mux3(n: usize) -> Ac0Circuit {
    assert!(n >= 5);
    let gates = vec![
        Gate {
            kind: GateKind::And,
            inputs: vec![GateInput::Lit(Literal::pos(0)), GateInput::Lit(Literal::pos(1)), GateInput::Lit(Literal::pos(2))],
        },
        Gate {
            kind: GateKind::And,
            inputs: vec![GateInput::Lit(Literal::neg(0)), GateInput::Lit(Literal::pos(3)), GateInput::Lit(Literal::pos(4))],
        },
        Gate { kind: GateKind::Or, inputs: vec![GateInput::Gate(0), GateInput::Gate(1)] },
        Gate {
            kind: GateKind::And,
            inputs: vec![GateInput::Gate(2), GateInput::Lit(Literal::neg(n - 1))],
        },
    ];
    Ac0Circuit::new(n, gates, 3).expect("valid")
}

fn expand_generator(
    cfg: &GeneratorConfig,
    seed: &BitString,
    tape: Option<&BitString>,
) -> Result<BitString> {
    Ok(match cfg {
        GeneratorConfig::Base { generator } => generator.expand(seed)?,
        GeneratorConfig::Composed { generator } => generator.generate(seed)?,
        GeneratorConfig::Hybrid { generator, index } => {
            let tape = tape.expect("hybrid sampling supplies a tape");
            generator.hybrid(*index, seed, tape)?
        }
    })
}

fn generator_seed_bits(cfg: &GeneratorConfig) -> usize {
    match cfg {
        GeneratorConfig::Base { generator } => generator.seed_length_bits(),
        GeneratorConfig::Composed { generator } | GeneratorConfig::Hybrid { generator, .. } => {
            generator.seed_length_bits()
        }
    }
}

fn generator_tape_bits(cfg: &GeneratorConfig) -> usize {
    match cfg {
        GeneratorConfig::Hybrid { generator, index } => index * generator.dimension(),
        _ => 0,
    }
}

pub fn run_fooling(cfg: &FoolingConfig) -> Result<ExperimentReport> {
    run_fooling_impl(cfg, false)
}

pub fn run_fooling_seq(cfg: &FoolingConfig) -> Result<ExperimentReport> {
    run_fooling_impl(cfg, true)
}

fn run_fooling_impl(cfg: &FoolingConfig, force_seq: bool) -> Result<ExperimentReport> {
    let n = cfg.circuits.n;
    ensure!(n <= 20, "exhaustive circuit expectation capped at n = 20");
    ensure!(cfg.generator.dimension() == n, "generator dimension must match the suite");
    match &cfg.generator {
        GeneratorConfig::Base { generator } => generator.validate()?,
        GeneratorConfig::Composed { generator } | GeneratorConfig::Hybrid { generator, .. } => {
            generator.validate()?
        }
    }
    let suite = build_suite(&cfg.circuits);
    ensure!(!suite.is_empty(), "empty circuit suite");
    let uniform: Vec<f64> =
        suite.iter().map(|(_, f)| prg_core::expectation_uniform(f.as_ref())).collect();
    let seed_bits = generator_seed_bits(&cfg.generator);
    let tape_bits = generator_tape_bits(&cfg.generator);

    let (counts, trials, exhaustive) = match cfg.seed_samples {
        None => {
            ensure!(
                (seed_bits + tape_bits) as u32 <= EXHAUSTIVE_SEED_BUDGET_BITS,
                "seed space of {} bits needs Monte-Carlo mode (set seed_samples)",
                seed_bits + tape_bits
            );
            let total = 1u64 << (seed_bits + tape_bits);
            let body = |_b: u64, range: std::ops::Range<u64>| {
                let mut counts = vec![0u64; suite.len()];
                for idx in range {
                    let all = BitString::from_fn(seed_bits + tape_bits, |i| {
                        (idx >> (seed_bits + tape_bits - 1 - i)) & 1 == 1
                    });
                    let seed = all.slice(0, seed_bits);
                    let tape = all.slice(seed_bits, tape_bits);
                    let out = expand_generator(&cfg.generator, &seed, Some(&tape))
                        .expect("validated generator");
                    for ((_, f), c) in suite.iter().zip(counts.iter_mut()) {
                        if f.eval(&out) {
                            *c += 1;
                        }
                    }
                }
                counts
            };
            let counts = if force_seq {
                blockwise_counts_seq(total, suite.len(), body)
            } else {
                blockwise_counts(total, suite.len(), body)
            };
            (counts, total, true)
        }
        Some(samples) => {
            ensure!(samples > 0, "need at least one seed sample");
            let body = |b: u64, range: std::ops::Range<u64>| {
                let mut rng_seed = block_rng(cfg.seed, b, Channel::XString);
                let mut rng_tape = block_rng(cfg.seed, b, Channel::Tape);
                let mut counts = vec![0u64; suite.len()];
                for _ in range {
                    let seed = random_bits(&mut rng_seed, seed_bits);
                    let tape = random_bits(&mut rng_tape, tape_bits);
                    let out = expand_generator(&cfg.generator, &seed, Some(&tape))
                        .expect("validated generator");
                    for ((_, f), c) in suite.iter().zip(counts.iter_mut()) {
                        if f.eval(&out) {
                            *c += 1;
                        }
                    }
                }
                counts
            };
            let counts = if force_seq {
                blockwise_counts_seq(samples, suite.len(), body)
            } else {
                blockwise_counts(samples, suite.len(), body)
            };
            (counts, samples, false)
        }
    };

    // Per-circuit bias, bounded by the confidence interval against the exact
    // uniform expectation.
    let mut worst = (0usize, 0.0f64);
    let mut rows = Vec::with_capacity(suite.len());
    for (i, ((name, _), &u)) in suite.iter().zip(&uniform).enumerate() {
        let estimate = counts[i] as f64 / trials as f64;
        let bias_hi = if exhaustive {
            (estimate - u).abs()
        } else {
            let (lo, hi) = clopper_pearson(counts[i], trials, cfg.confidence);
            (lo - u).abs().max((hi - u).abs())
        };
        if bias_hi > worst.1 {
            worst = (i, bias_hi);
        }
        rows.push(json!({
            "circuit": name,
            "uniform": u,
            "estimate": estimate,
            "bias_upper": bias_hi,
        }));
    }
    rows.sort_by(|a, b| {
        b["bias_upper"].as_f64().unwrap().total_cmp(&a["bias_upper"].as_f64().unwrap())
    });
    rows.truncate(5);
    let verdict = if worst.1 <= cfg.epsilon { Verdict::Pass } else { Verdict::Fail };
    Ok(ExperimentReport {
        experiment: "fool".into(),
        label: cfg
            .label
            .clone()
            .unwrap_or_else(|| format!("n{} circuits{}", n, suite.len())),
        numerator: counts[worst.0],
        denominator: trials,
        p_hat: counts[worst.0] as f64 / trials as f64,
        ci99: if exhaustive {
            let p = counts[worst.0] as f64 / trials as f64;
            [p, p]
        } else {
            let (lo, hi) = clopper_pearson(counts[worst.0], trials, cfg.confidence);
            [lo, hi]
        },
        bound: Some(cfg.epsilon),
        informative: Some(true),
        verdict,
        stamp: Stamp::new(serde_json::to_value(cfg)?),
        details: json!({
            "max_bias_upper": worst.1,
            "worst_circuit": suite[worst.0].0,
            "exhaustive_seeds": exhaustive,
            "top_biases": rows,
        }),
    })
}
