//! `vacohom`: runs the exact verification suites and writes a JSON report.
//! Exit status 0 iff every assertion passed, 1 on an assertion failure,
//! 2 when the run could not start or a suite errored.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use vacohom::differential::cohomology::SlotKind;
use vacohom::suites::{self, Settings, SuiteReport};

const SCHEMA: &str = "vacohom-report/1";

#[derive(Parser)]
#[command(name = "vacohom", version, about = "Exact checks for vertex algebra cohomology and the ε-product")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// TOML file with run settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Weight cutoff K.
    #[arg(long, global = true)]
    cutoff: Option<u32>,
    /// Highest ε order L.
    #[arg(long, global = true)]
    order: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of seeded cochains for check-complex.
    #[arg(long, global = true)]
    cochains: Option<usize>,
    /// Number of seeded pairs for check-leibniz.
    #[arg(long, global = true)]
    pairs: Option<usize>,
    /// Report path.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// δδ = 0 on seeded valid cochains.
    CheckComplex,
    /// The Leibniz law for the ε-product, and its basis independence.
    CheckLeibniz,
    /// Membership validators, S_n stability, locality and form properties.
    CheckProperties,
    /// Truncated cohomology at one slot.
    Cohomology {
        #[arg(long)]
        n: usize,
        /// An integer or `1/2`.
        #[arg(long)]
        m: String,
    },
    /// Class representatives, closedness and the shift decomposition.
    Classes,
    /// The bracket relations and Jacobi on a solved triple.
    LieTable,
    /// Checks a sewing configuration file.
    SewValidate { file: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckComplex => "check-complex",
            Command::CheckLeibniz => "check-leibniz",
            Command::CheckProperties => "check-properties",
            Command::Cohomology { .. } => "cohomology",
            Command::Classes => "classes",
            Command::LieTable => "lie-table",
            Command::SewValidate { .. } => "sew-validate",
        }
    }
}

/// The config file; every field is optional.
#[derive(Deserialize, Serialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    cutoff: Option<u32>,
    order: Option<u32>,
    seed: Option<u64>,
    cochains: Option<usize>,
    pairs: Option<usize>,
    output: Option<PathBuf>,
}

fn settings(args: &RunArgs) -> anyhow::Result<(Settings, PathBuf)> {
    let file = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str::<RunConfig>(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    let mut s = Settings::default();
    s.cutoff = args.cutoff.or(file.cutoff);
    s.order = args.order.or(file.order);
    s.seed = args.seed.or(file.seed).unwrap_or(s.seed);
    s.cochains = args.cochains.or(file.cochains).unwrap_or(s.cochains);
    s.pairs = args.pairs.or(file.pairs).unwrap_or(s.pairs);
    if s.cutoff == Some(0) {
        bail!("the weight cutoff must be at least 1");
    }
    let out = args.output.clone().or(file.output).unwrap_or_else(|| PathBuf::from("vacohom-report.json"));
    Ok((s, out))
}

fn parse_slot(m: &str) -> anyhow::Result<SlotKind> {
    match m.trim() {
        "1/2" | "half" => Ok(SlotKind::Half),
        x => Ok(SlotKind::Integer(x.parse().with_context(|| format!("m must be an integer or 1/2, got {x:?}"))?)),
    }
}

fn run(command: &Command, s: &Settings) -> anyhow::Result<Vec<SuiteReport>> {
    let reports = match command {
        Command::CheckComplex => vec![suites::chain_complex(s)?],
        Command::CheckLeibniz => vec![suites::leibniz(s)?, suites::basis_independence(s)?, suites::nilpotency(s)?],
        Command::CheckProperties => vec![suites::membership(s)?, suites::sn_stability(s)?, suites::oracle(s)?, suites::form(s)?],
        Command::Cohomology { n, m } => {
            let kind = parse_slot(m)?;
            if kind == SlotKind::Half && *n != 2 {
                bail!("the half slot exists only for n = 2");
            }
            vec![suites::cohomology_at(s, *n, kind)?]
        }
        Command::Classes => vec![suites::classes(s)?],
        Command::LieTable => vec![suites::lie(s)?],
        Command::SewValidate { file } => {
            let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            vec![suites::sewing(&text)?]
        }
    };
    Ok(reports)
}

fn write_report(path: &Path, value: &serde_json::Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let (s, out) = match settings(&cli.run) {
        Ok(x) => x,
        Err(e) => {
            let out = cli.run.output.clone().unwrap_or_else(|| PathBuf::from("vacohom-report.json"));
            eprintln!("error: {e:#}");
            let _ = write_report(&out, &json!({ "schema": SCHEMA, "command": name, "passed": false, "error": format!("{e:#}") }));
            return ExitCode::from(2);
        }
    };
    let (code, report) = match run(&cli.command, &s) {
        Ok(reports) => {
            for r in &reports {
                println!("{} {}: {} assertions, {} failed, {:.1} s", if r.passed { "PASS" } else { "FAIL" }, r.name, r.assertions, r.failures.len(), r.seconds);
                for f in r.failures.iter().take(5) {
                    println!("  {}: {}", f.check, f.witness);
                }
            }
            let passed = reports.iter().all(|r| r.passed);
            (if passed { 0 } else { 1 }, json!({ "schema": SCHEMA, "command": name, "settings": s, "passed": passed, "suites": reports }))
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            (2, json!({ "schema": SCHEMA, "command": name, "settings": s, "passed": false, "error": format!("{e:#}") }))
        }
    };
    if let Err(e) = write_report(&out, &report) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    println!("report: {}", out.display());
    ExitCode::from(code)
}
