//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use prg_core::{
    canonical_partial_dt_run, cdt_depth, find_powerful_refutation, text, witness_search,
    witness_search_decoupled, BitString, DnfFormula, DtOracle, FamilyDtOracle, PartialWitness,
    Restriction,
};
use prg_lab::config::{ExperimentConfig, GeneratorConfig};
use prg_lab::report::{self, ExperimentReport};
use prg_lab::{run_experiment, run_fooling, run_multi_switching, run_switching};

/// Restriction-lemma laboratory: decision-tree oracles, witness searchers,
/// pseudorandom generators and Monte-Carlo experiments.
#[derive(Parser)]
#[command(name = "prg-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact decision-tree depth of a (restricted) DNF.
    Dt(FormulaArgs),
    /// Canonical decision tree depth of a (restricted) DNF.
    Cdt(FormulaArgs),
    /// Existence of a w-partial depth-t decision tree for a family.
    PartialDt(PartialDtArgs),
    /// Run the witness searcher on a partial witness.
    WitnessSearch(WitnessSearchArgs),
    /// Find a powerful refutation for a family.
    Refute(RefuteArgs),
    /// Expand a generator seed.
    Gen(GenArgs),
    /// Fooling experiment from a config file.
    Fool(ConfigArgs),
    /// Switching experiment from a config file.
    Switch(ConfigArgs),
    /// Multi-switching experiment from a config file.
    MultiSwitch(ConfigArgs),
    /// Run any experiment config (the `experiment` field selects the kind).
    Run(ConfigArgs),
    /// Merge JSONL reports into a CSV summary.
    Report(ReportArgs),
}

#[derive(Args)]
struct FormulaArgs {
    /// DNF file (`dnf n=.. m=..` + one term per line).
    #[arg(long)]
    formula: PathBuf,
    /// Restriction over `01*`; defaults to all stars.
    #[arg(long)]
    restriction: Option<String>,
    /// Cap on the live variables (dt) / stars (cdt).
    #[arg(long, default_value_t = 16)]
    cap: usize,
}

#[derive(Args)]
struct PartialDtArgs {
    /// Family file: one or more `dnf` sections.
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    budget: usize,
    #[arg(long)]
    restriction: Option<String>,
    /// Write the certificate (common tree) as text here when one exists.
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessSearchArgs {
    #[arg(long)]
    formula: PathBuf,
    /// Partial witness JSON: {"stages": [{"positions": [...], "responses": [...]}]}.
    #[arg(long)]
    witness: PathBuf,
    #[arg(long)]
    restriction: Option<String>,
    /// Advice string over `01` (coupled mode).
    #[arg(long)]
    advice: Option<String>,
    /// Full running string over `01` (decoupled mode).
    #[arg(long)]
    running: Option<String>,
}

#[derive(Args)]
struct RefuteArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    budget: usize,
    #[arg(long)]
    restriction: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    /// Generator descriptor JSON ({"type": "base"|"composed"|"hybrid", ...}).
    #[arg(long)]
    generator: PathBuf,
    /// Seed as hex.
    #[arg(long)]
    seed: String,
    /// Hybrid tape as hex (required for hybrid generators).
    #[arg(long)]
    tape: Option<String>,
    /// Write the seed layout descriptor JSON here.
    #[arg(long)]
    layout: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Append the report as a JSON line here (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a CSV summary of this run here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Input JSONL report files.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    csv: PathBuf,
}

fn load_restriction(arg: &Option<String>, n: usize) -> Result<Restriction> {
    match arg {
        None => Ok(Restriction::all_star(n)),
        Some(s) => {
            let r = Restriction::from_str(s)?;
            if r.dimension() != n {
                bail!("restriction has {} cells, formula has n={}", r.dimension(), n);
            }
            Ok(r)
        }
    }
}

fn emit_report(report: &ExperimentReport, args: &ConfigArgs) -> Result<()> {
    let line = serde_json::to_string(report)?;
    match &args.out {
        None => println!("{line}"),
        Some(path) => {
            let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(f, "{line}")?;
        }
    }
    if let Some(path) = &args.csv {
        let mut buf = Vec::new();
        report::write_csv(&mut buf, std::slice::from_ref(report))?;
        fs::write(path, buf)?;
    }
    if !report.passed() {
        std::process::exit(1);
    }
    Ok(())
}

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    Ok(serde_json::from_str(&text)?)
}

fn main() -> Result<()> {
    configure_workers()?;
    let cli = Cli::parse();
    match cli.command {
        Command::Dt(args) => {
            let f = text::parse_dnf(&fs::read_to_string(&args.formula)?)?;
            let rho = load_restriction(&args.restriction, dim(&f))?;
            let mut oracle = DtOracle::new(args.cap);
            println!("{}", oracle.depth_of_restricted(&f, &rho)?);
        }
        Command::Cdt(args) => {
            let f = text::parse_dnf(&fs::read_to_string(&args.formula)?)?;
            let rho = load_restriction(&args.restriction, dim(&f))?;
            println!("{}", cdt_depth(&f, &rho, args.cap)?);
        }
        Command::PartialDt(args) => {
            let family = text::parse_family(&fs::read_to_string(&args.family)?)?;
            let n = family.first().map(dim).unwrap_or(0);
            let rho = load_restriction(&args.restriction, n)?;
            let mut oracle = FamilyDtOracle::new(&family, args.width)?;
            match oracle.certificate(&rho, args.budget)? {
                Some(cert) => {
                    println!("yes (common depth {})", cert.common_depth());
                    if let Some(path) = args.certificate {
                        fs::write(path, format_common_tree(&cert.tree))?;
                    }
                }
                None => println!("no"),
            }
        }
        Command::WitnessSearch(args) => {
            let f = text::parse_dnf(&fs::read_to_string(&args.formula)?)?;
            let pw: PartialWitness = serde_json::from_str(&fs::read_to_string(&args.witness)?)?;
            let result = match (&args.advice, &args.running) {
                (Some(y), None) => {
                    let rho = load_restriction(&args.restriction, dim(&f))?;
                    let y = BitString::parse_binary(y)?;
                    witness_search(&f, &rho, &pw, &y)
                }
                (None, Some(z)) => {
                    let z = BitString::parse_binary(z)?;
                    witness_search_decoupled(&f, &z, &pw)
                }
                _ => bail!("provide exactly one of --advice (coupled) or --running (decoupled)"),
            };
            match result {
                Ok(wit) => println!("{}", serde_json::to_string(&wit.to_absolute(&f)?)?),
                Err(e) => {
                    eprintln!("ERROR: {e}");
                    std::process::exit(1);
                }
            }
        }
        Command::Refute(args) => {
            let family = text::parse_family(&fs::read_to_string(&args.family)?)?;
            let n = family.first().map(dim).unwrap_or(0);
            let rho = load_restriction(&args.restriction, n)?;
            match find_powerful_refutation(&family, &rho, args.width, args.budget)? {
                None => println!("none (a partial decision tree exists)"),
                Some(r) => {
                    // Echo the replayed run so the refutation is auditable.
                    let mut dt = DtOracle::default();
                    let mut beta = &r.beta;
                    let run = canonical_partial_dt_run(
                        &family, &rho, &r.z, &mut beta, args.width, args.budget, &mut dt,
                    )?;
                    println!(
                        "{}",
                        serde_json::json!({
                            "z": r.z.to_string(),
                            "beta": r.beta.to_string(),
                            "queries": run.counter,
                            "blocks": run.stages.iter().map(|s| s.committed_vars.clone()).collect::<Vec<_>>(),
                        })
                    );
                }
            }
        }
        Command::Gen(args) => {
            let gen: GeneratorConfig = serde_json::from_str(&fs::read_to_string(&args.generator)?)?;
            let (output, layout) = expand_cli(&gen, &args)?;
            println!("{}", output.to_hex());
            if let Some(path) = args.layout {
                fs::write(path, serde_json::to_string_pretty(&layout)?)?;
            }
        }
        Command::Fool(args) => {
            let ExperimentConfig::Fooling(cfg) = load_config(&args)? else {
                bail!("config is not a fooling experiment");
            };
            emit_report(&run_fooling(&cfg)?, &args)?;
        }
        Command::Switch(args) => {
            let ExperimentConfig::Switch(cfg) = load_config(&args)? else {
                bail!("config is not a switching experiment");
            };
            emit_report(&run_switching(&cfg)?, &args)?;
        }
        Command::MultiSwitch(args) => {
            let ExperimentConfig::MultiSwitch(cfg) = load_config(&args)? else {
                bail!("config is not a multi-switching experiment");
            };
            emit_report(&run_multi_switching(&cfg)?, &args)?;
        }
        Command::Run(args) => {
            let cfg = load_config(&args)?;
            emit_report(&run_experiment(&cfg)?, &args)?;
        }
        Command::Report(args) => {
            let mut reports = Vec::new();
            for path in &args.input {
                let data = fs::read(path)?;
                reports.extend(report::read_jsonl(&mut data.as_slice())?);
            }
            let mut buf = Vec::new();
            report::write_csv(&mut buf, &reports)?;
            fs::write(&args.csv, buf)?;
            if reports.iter().any(|r| !r.passed()) {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}

fn dim(f: &DnfFormula) -> usize {
    use prg_core::BooleanFn;
    f.dimension()
}

fn expand_cli(
    gen: &GeneratorConfig,
    args: &GenArgs,
) -> Result<(BitString, serde_json::Value)> {
    Ok(match gen {
        GeneratorConfig::Base { generator } => {
            let seed = BitString::parse_hex(&args.seed, generator.seed_length_bits())?;
            let layout = serde_json::json!({
                "role": "base",
                "offset": 0,
                "bits": generator.seed_length_bits(),
            });
            (generator.expand(&seed)?, layout)
        }
        GeneratorConfig::Composed { generator } => {
            let seed = BitString::parse_hex(&args.seed, generator.seed_length_bits())?;
            (generator.generate(&seed)?, serde_json::to_value(generator.layout())?)
        }
        GeneratorConfig::Hybrid { generator, index } => {
            let seed = BitString::parse_hex(&args.seed, generator.seed_length_bits())?;
            let tape_bits = index * generator.dimension();
            let tape = match &args.tape {
                Some(hex) => BitString::parse_hex(hex, tape_bits)?,
                None if tape_bits == 0 => BitString::zeros(0),
                None => bail!("hybrid index {index} needs --tape with {tape_bits} bits"),
            };
            (generator.hybrid(*index, &seed, &tape)?, serde_json::to_value(generator.layout())?)
        }
    })
}

fn format_common_tree(tree: &prg_core::CommonTree) -> String {
    fn walk(t: &prg_core::CommonTree, out: &mut String) {
        match t {
            prg_core::CommonTree::Leaf { completions } => {
                out.push('[');
                for (i, c) in completions.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push_str(&c.to_text());
                }
                out.push(']');
            }
            prg_core::CommonTree::Query { var, zero, one } => {
                out.push_str(&format!("(x{var} "));
                walk(zero, out);
                out.push(' ');
                walk(one, out);
                out.push(')');
            }
        }
    }
    let mut s = String::new();
    walk(tree, &mut s);
    s.push('\n');
    s
}

/// Worker-count control: the only environment knob. Anything else comes from
/// config files.
fn configure_workers() -> Result<()> {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("PRG_LAB_WORKERS") {
        let workers: usize = v.parse().context("PRG_LAB_WORKERS must be an integer")?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("rayon pool already initialized")?;
    }
    Ok(())
}
