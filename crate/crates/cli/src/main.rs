use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rado_core::ip::{
    banach_density_window, finite_products, finite_sums, injective_sub_ip, is_ip_large_at_scale,
    upper_density_window, GeneratorSequence, IpLargeness,
};
use rado_core::pipeline::{analyze, AnalysisReport, EvidenceOptions, PipelineError, PipelineOptions, Stage};
use rado_core::verifier::{
    check_coloring, export_dimacs, rado_number, search_coloring, valuation_parity_coloring,
    ColoringProblem, Mode, OutcomeKind, RadoNumber, DEFAULT_NODE_BUDGET,
};
use rado_core::{parse_equation_with, InjectivityConstraint, ParseOptions, Polynomial, Verdict};

const EXIT_ERROR: u8 = 1;
const EXIT_OPEN: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;

#[derive(Parser)]
#[command(name = "rado", version, about = "Partition regularity analysis for Diophantine equations")]
struct Cli {
    /// Emit JSON (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Output format; `text` prints a short human summary.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run every applicable analysis and aggregate a verdict.
    Classify(ClassifyArgs),
    /// Search colorings of [1..N], compute Rado numbers, or check a coloring.
    Verify(VerifyArgs),
    /// Export the r-coloring problem on [1..N] as DIMACS CNF.
    Dimacs(DimacsArgs),
    /// Finite sums and products, IP-largeness and density windows.
    #[command(subcommand)]
    Ip(IpCommand),
    /// Parse an equation and print its canonical form.
    Parse(ParseArgs),
}

#[derive(Args)]
struct EquationArg {
    /// Equation such as "x + y = z^2".
    equation: String,
    /// Allow negative exponents.
    #[arg(long)]
    laurent: bool,
}

impl EquationArg {
    fn polynomial(&self) -> Result<Polynomial> {
        let eq = parse_equation_with(
            &self.equation,
            ParseOptions {
                laurent: self.laurent,
            },
        )
        .with_context(|| format!("cannot parse `{}`", self.equation))?;
        Ok(eq.normalized)
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    eq: EquationArg,
    /// Stages to skip, comma separated (e.g. `family-f,mod-p`).
    #[arg(long, value_delimiter = ',')]
    skip: Vec<String>,
    /// Depth bound for certificate derivation.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Largest prime tried by the congruence obstruction.
    #[arg(long, default_value_t = 1000)]
    prime_bound: u64,
    /// Run a coloring search on [1..N] when the verdict is open.
    #[arg(long)]
    evidence_n: Option<u64>,
    #[arg(long, default_value_t = 2)]
    evidence_colors: u32,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// Report zero timings so that repeated runs give identical output.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Any,
    NonTrivial,
    ExcludeConstant,
    /// All variables pairwise distinct.
    Injective,
}

fn mode(arg: ModeArg, p: &Polynomial) -> Result<Mode> {
    Ok(match arg {
        ModeArg::Any => Mode::Any,
        ModeArg::NonTrivial => Mode::NonTrivial,
        ModeArg::ExcludeConstant => Mode::ExcludeConstant,
        ModeArg::Injective => {
            let c = InjectivityConstraint::full(p.used_variable_names())
                .context("injective mode needs at least two variables")?;
            Mode::Injectivity(vec![c])
        }
    })
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    eq: EquationArg,
    #[arg(short = 'N', long = "n", default_value_t = 20)]
    n: u64,
    #[arg(short = 'r', long = "colors", default_value_t = 2)]
    colors: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Any)]
    mode: ModeArg,
    /// Node budget for the backtracking search.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// Find the least N forcing a monochromatic solution, up to --n-max.
    #[arg(long)]
    rado_number: bool,
    #[arg(long, default_value_t = 200)]
    n_max: u64,
    /// Check a named coloring instead of searching: `valuation<b>` colors k
    /// by the parity of the exponent of b in k.
    #[arg(long)]
    coloring: Option<String>,
}

#[derive(Args)]
struct DimacsArgs {
    #[command(flatten)]
    eq: EquationArg,
    #[arg(short = 'N', long = "n")]
    n: u64,
    #[arg(short = 'r', long = "colors", default_value_t = 2)]
    colors: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Any)]
    mode: ModeArg,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum IpCommand {
    /// Sums over nonempty subsets of the first k generators.
    Sums {
        #[arg(value_delimiter = ',', required = true)]
        generators: Vec<u64>,
        #[arg(short)]
        k: Option<usize>,
    },
    /// Products over nonempty subsets of the first k generators.
    Products {
        #[arg(value_delimiter = ',', required = true)]
        generators: Vec<u64>,
        #[arg(short)]
        k: Option<usize>,
    },
    /// Subsequence with pairwise distinct finite sums.
    SubIp {
        #[arg(value_delimiter = ',', required = true)]
        generators: Vec<u64>,
    },
    /// Look for k generators whose finite sums lie in the set.
    Large {
        #[arg(value_delimiter = ',', required = true)]
        set: Vec<u64>,
        #[arg(short)]
        k: usize,
        #[arg(short = 'N', long = "n")]
        n: u64,
    },
    /// Density of the set in [1..N], and in the best window of length --window.
    Density {
        #[arg(value_delimiter = ',', required = true)]
        set: Vec<u64>,
        #[arg(short = 'N', long = "n")]
        n: u64,
        #[arg(long)]
        window: Option<u64>,
    },
}

#[derive(Args)]
struct ParseArgs {
    #[command(flatten)]
    eq: EquationArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = cli.format == Format::Text && !cli.json;
    match run(cli.command, text) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let Some(PipelineError::Consistency { .. }) = e.downcast_ref::<PipelineError>() {
                eprintln!("internal error: {e:#}");
                return ExitCode::from(EXIT_INCONSISTENT);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn emit(value: &Value, text: Option<String>) -> Result<()> {
    match text {
        Some(t) => println!("{t}"),
        None => println!("{}", serde_json::to_string_pretty(value)?),
    }
    Ok(())
}

fn run(command: Command, text: bool) -> Result<u8> {
    match command {
        Command::Classify(a) => classify(a, text),
        Command::Verify(a) => verify(a, text),
        Command::Dimacs(a) => dimacs(a),
        Command::Ip(c) => ip(c, text),
        Command::Parse(a) => {
            let eq = parse_equation_with(
                &a.eq.equation,
                ParseOptions {
                    laurent: a.eq.laurent,
                },
            )
            .with_context(|| format!("cannot parse `{}`", a.eq.equation))?;
            let v = json!({
                "source": a.eq.equation,
                "canonical": eq.normalized.to_string(),
                "variables": eq.variable_order,
                "has_constant_term": eq.has_constant_term,
                "polynomial": eq.normalized,
            });
            emit(&v, text.then(|| format!("{} = 0", eq.normalized)))?;
            Ok(0)
        }
    }
}

fn classify(a: ClassifyArgs, text: bool) -> Result<u8> {
    let mut skip = BTreeSet::new();
    for name in &a.skip {
        match Stage::from_name(name) {
            Some(s) => {
                skip.insert(s);
            }
            None => bail!(
                "unknown stage `{name}`; stages are {}",
                Stage::ALL.map(Stage::name).join(", ")
            ),
        }
    }
    let options = PipelineOptions {
        laurent: a.eq.laurent,
        skip,
        derive_depth: a.depth,
        prime_bound: a.prime_bound,
        evidence: a.evidence_n.map(|n| EvidenceOptions {
            n,
            colors: a.evidence_colors,
            budget: a.budget,
        }),
        record_timing: !a.no_timing,
    };
    let report = analyze(&a.eq.equation, &options)?;
    let summary = text.then(|| summarize(&report));
    emit(&serde_json::to_value(&report)?, summary)?;
    Ok(if report.verdict() == Verdict::Open { EXIT_OPEN } else { 0 })
}

fn summarize(r: &AnalysisReport) -> String {
    let mut out = format!(
        "{}\n  canonical: {} = 0\n  verdict: {:?}\n",
        r.equation.source, r.equation.canonical, r.final_classification.verdict
    );
    for s in &r.stages {
        let status = serde_json::to_value(&s.status).unwrap_or(Value::Null);
        let label = status["status"].as_str().unwrap_or("?").replace('_', " ");
        match status.get("detail").and_then(Value::as_str) {
            Some(d) => out.push_str(&format!("  {:<20} {label}: {d}\n", s.stage.name())),
            None => out.push_str(&format!("  {:<20} {label}\n", s.stage.name())),
        }
    }
    for c in &r.final_classification.injectivity {
        out.push_str(&format!(
            "  injectivity: at least {} distinct among {}\n",
            c.min_distinct,
            c.variables.join(", ")
        ));
    }
    out.trim_end().to_string()
}

fn parse_valuation(name: &str) -> Result<u64> {
    name.strip_prefix("valuation")
        .and_then(|b| b.parse().ok())
        .with_context(|| format!("unknown coloring `{name}`; expected valuation<base>, e.g. valuation2"))
}

fn verify(a: VerifyArgs, text: bool) -> Result<u8> {
    let p = a.eq.polynomial()?;
    let m = mode(a.mode, &p)?;
    if let Some(name) = &a.coloring {
        let base = parse_valuation(name)?;
        let coloring = valuation_parity_coloring(a.n, base)?;
        let hit = check_coloring(&p, &coloring, &m)?;
        let v = json!({
            "equation": a.eq.equation,
            "n": a.n,
            "coloring": name,
            "mode": m,
            "monochromatic_solution": hit,
        });
        let summary = match &hit {
            Some(t) => format!("monochromatic solution {t:?}"),
            None => format!("no monochromatic solution in [1..{}]", a.n),
        };
        emit(&v, text.then_some(summary))?;
        return Ok(0);
    }
    if a.rado_number {
        let found = rado_number(&p, a.colors, &m, a.n_max, a.budget)?;
        let v = json!({
            "equation": a.eq.equation,
            "colors": a.colors,
            "mode": m,
            "rado_number": found,
        });
        let summary = match found {
            RadoNumber::Found(n) => n.to_string(),
            RadoNumber::LowerBound(n) => format!("> {n}"),
            RadoNumber::BudgetExhausted(n) => format!("budget exhausted at N = {n}"),
        };
        emit(&v, text.then_some(summary))?;
        return Ok(0);
    }
    let problem = ColoringProblem::new(p, a.n, a.colors, m.clone())?;
    let outcome = search_coloring(&problem, a.budget)?;
    let v = json!({
        "equation": a.eq.equation,
        "n": a.n,
        "colors": a.colors,
        "mode": m,
        "outcome": outcome,
    });
    let summary = match outcome.kind {
        OutcomeKind::ColoringFound => {
            let classes: BTreeMap<u32, Vec<u64>> =
                outcome.witness.as_ref().map(|w| w.classes()).unwrap_or_default();
            let mut s = format!("ColoringFound on [1..{}]", a.n);
            for (c, members) in classes {
                s.push_str(&format!("\n  color {c}: {members:?}"));
            }
            s
        }
        OutcomeKind::Forced => format!("Forced: every {}-coloring of [1..{}] has one", a.colors, a.n),
        OutcomeKind::BudgetExhausted => "BudgetExhausted".to_string(),
    };
    emit(&v, text.then_some(summary))?;
    Ok(0)
}

fn dimacs(a: DimacsArgs) -> Result<u8> {
    let p = a.eq.polynomial()?;
    let m = mode(a.mode, &p)?;
    let problem = ColoringProblem::new(p, a.n, a.colors, m)?;
    let cnf = export_dimacs(&problem)?;
    match &a.out {
        Some(path) => fs::write(path, cnf).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{cnf}"),
    }
    Ok(0)
}

fn generators(g: Vec<u64>) -> Result<GeneratorSequence> {
    Ok(GeneratorSequence::new(g)?)
}

fn ip(c: IpCommand, text: bool) -> Result<u8> {
    let (v, summary) = match c {
        IpCommand::Sums { generators: g, k } => {
            let k = k.unwrap_or(g.len());
            let s = finite_sums(&generators(g)?, k)?;
            (json!({ "k": k, "finite_sums": s }), format!("{s:?}"))
        }
        IpCommand::Products { generators: g, k } => {
            let k = k.unwrap_or(g.len());
            let s = finite_products(&generators(g)?, k)?;
            (json!({ "k": k, "finite_products": s }), format!("{s:?}"))
        }
        IpCommand::SubIp { generators: g } => {
            let s = injective_sub_ip(&generators(g)?);
            let summary = format!("{:?}", s.generators());
            (json!({ "generators": s }), summary)
        }
        IpCommand::Large { set, k, n } => {
            let set: BTreeSet<u64> = set.into_iter().collect();
            let r = is_ip_large_at_scale(&set, k, n)?;
            let summary = match &r {
                IpLargeness::Found(g) => format!("generators {:?}", g.generators()),
                IpLargeness::NotFoundAtScale => format!("no {k} generators within [1..{n}]"),
            };
            (json!({ "k": k, "n": n, "result": r }), summary)
        }
        IpCommand::Density { set, n, window } => {
            let set: BTreeSet<u64> = set.into_iter().collect();
            let d = upper_density_window(&set, n)?;
            let mut v = json!({ "n": n, "density": [d.numer(), d.denom()] });
            let mut summary = format!("density {d}");
            if let Some(len) = window {
                let b = banach_density_window(&set, n, len)?;
                v["window"] = json!(len);
                v["window_density"] = json!([b.numer(), b.denom()]);
                summary.push_str(&format!(", best window of length {len}: {b}"));
            }
            (v, summary)
        }
    };
    emit(&v, text.then_some(summary))?;
    Ok(0)
}
