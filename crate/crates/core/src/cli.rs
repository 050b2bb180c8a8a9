//! The `plinf` command line: validation, MC reports, generators and operad checks.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{validate, Algebra, Element, GradedModule, TableAlgebra, Violation};
use crate::barratt_eccles::{
    co_leibniz_defect, dual_differential, epsilon_s, partial_compose, partial_decompose, BETuple, InsertionRange,
};
use crate::error::{Error, Result};
use crate::free_cobar::{cobar_interval, cobar_point, FreeAlgebra, FreeParams};
use crate::mc::{enumerate_mc, pi0, DEFAULT_CAP};
use crate::scalars::PrimeField;
use crate::simplicial::ChainComplex;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Counterexamples listed in a report; the total is always given.
const SHOWN: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "plinf", version, about = "Truncated curved L-infinity algebras over prime fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunConfig {
    /// Prime modulus; for file inputs it must agree with the file.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Truncation degree; for file inputs it must agree with the file.
    #[arg(long = "W", global = true)]
    pub w: Option<usize>,
    /// Largest number of candidates any enumeration may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP, value_parser = clap::value_parser!(usize))]
    pub cap: usize,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check degrees, curvature and relations of an algebra file.
    Validate { file: PathBuf },
    /// Enumerate Maurer-Cartan elements, optionally with gauge classes.
    Mc {
        file: PathBuf,
        #[arg(long)]
        pi0: bool,
        /// Include one gauge witness per related pair (implies --pi0).
        #[arg(long)]
        witnesses: bool,
    },
    /// Emit a free or cobar algebra as an algebra file.
    Generate {
        #[arg(value_enum)]
        kind: GenerateKind,
        /// Bound on leaves plus corks.
        #[arg(long = "A", default_value_t = 2)]
        a: usize,
        /// Generating complex for the uncurved `free` kind; empty when omitted.
        #[arg(long)]
        complex: Option<PathBuf>,
    },
    /// Exhaustive (or sampled) checks of Barratt-Eccles identities.
    Operad {
        #[arg(value_enum)]
        check: OperadCheck,
        /// Largest arity.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Range::Full)]
        range: Range,
        /// Include decompositions through a cork in `coleibniz`.
        #[arg(long)]
        corks: bool,
        /// Check this many random labels per arity and degree instead of all.
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    Free,
    CobarPoint,
    CobarInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperadCheck {
    Duality,
    Dsquared,
    Coleibniz,
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Range {
    Full,
    Displayed,
}

impl From<Range> for InsertionRange {
    fn from(r: Range) -> Self {
        match r {
            Range::Full => InsertionRange::Full,
            Range::Displayed => InsertionRange::Displayed,
        }
    }
}

/// What a run prints and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let config = cli.config.clone();
    match execute(&cli.command, &config) {
        Ok(report) => {
            let body = render(&report, config.format);
            match &config.out {
                Some(path) => match std::fs::write(path, &body) {
                    Ok(()) => Outcome { code: report.code, stdout: String::new(), stderr: String::new() },
                    Err(e) => failure(&Error::Io(e), config.format),
                },
                None => Outcome { code: report.code, stdout: body, stderr: String::new() },
            }
        }
        Err(e) => failure(&e, config.format),
    }
}

fn failure(e: &Error, format: Format) -> Outcome {
    let code = match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_USAGE,
    };
    let stderr = match format {
        Format::Json => {
            let mut body = json!({ "schema": "plinf.error/1", "error": e.to_string() });
            if let Error::Parse { line, column, .. } = e {
                body["line"] = json!(line);
                body["column"] = json!(column);
            }
            pretty(&body)
        }
        Format::Text => format!("error: {e}\n"),
    };
    Outcome { code, stdout: String::new(), stderr }
}

/// A finished report: JSON body, a text rendering and the exit code.
pub struct Report {
    pub code: i32,
    pub json: Value,
    pub text: String,
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => pretty(&report.json),
        Format::Text => report.text.clone(),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn execute(command: &Command, config: &RunConfig) -> Result<Report> {
    if config.cap == 0 {
        return Err(Error::Schema("--cap must be at least 1".into()));
    }
    match command {
        Command::Validate { file } => cmd_validate(&load(file, config)?),
        Command::Mc { file, pi0, witnesses } => cmd_mc(&load(file, config)?, *pi0 || *witnesses, *witnesses, config.cap),
        Command::Generate { kind, a, complex } => {
            let field = PrimeField::new(config.p.unwrap_or(2))?;
            let complex = match complex {
                Some(path) => Some(ChainComplex::from_json(field, &std::fs::read_to_string(path)?)?),
                None => None,
            };
            cmd_generate(field, *kind, config.w.unwrap_or(1), *a, complex.as_ref(), config.cap)
        }
        Command::Operad { check, n, range, corks, sample } => {
            let field = PrimeField::new(config.p.unwrap_or(2))?;
            let bounds = OperadBounds {
                n: *n,
                r: config.w.unwrap_or(1),
                range: (*range).into(),
                corks: *corks,
                sample: sample.map(|s| (s, config.seed)),
            };
            cmd_operad(field, *check, &bounds, config.cap)
        }
    }
}

fn load(path: &PathBuf, config: &RunConfig) -> Result<TableAlgebra> {
    let alg = TableAlgebra::from_json(&std::fs::read_to_string(path)?)?;
    if let Some(p) = config.p {
        if p != alg.field().modulus() {
            return Err(Error::Schema(format!("--p {p} disagrees with the file's p = {}", alg.field().modulus())));
        }
    }
    if let Some(w) = config.w {
        if w != alg.max_degree() {
            return Err(Error::Schema(format!("--W {w} disagrees with the file's W = {}", alg.max_degree())));
        }
    }
    Ok(alg)
}

fn describe(v: &Violation) -> String {
    let label = v.label.as_ref().map(|l| format!(" {l:?}")).unwrap_or_default();
    format!("{}{} ({}): defect {:?}", v.identity, label, v.inputs.join(", "), v.defect)
}

pub fn cmd_validate<A: Algebra + ?Sized>(alg: &A) -> Result<Report> {
    let report = validate(alg);
    let json = json!({
        "schema": "plinf.validate/1",
        "p": alg.field().modulus(),
        "W": alg.max_degree(),
        "pass": report.pass,
        "violations": to_value(&report.violations),
    });
    let mut text = if report.pass {
        "PASS\n".to_string()
    } else {
        format!("FAIL: {} violated identities\n", report.violations.len())
    };
    for v in &report.violations {
        text.push_str(&format!("  {}\n", describe(v)));
    }
    Ok(Report { code: if report.pass { EXIT_PASS } else { EXIT_FAIL }, json, text })
}

fn named<A: Algebra + ?Sized>(alg: &A, x: &Element) -> Value {
    to_value(&alg.module().to_named(x))
}

fn show<A: Algebra + ?Sized>(alg: &A, x: &Element) -> String {
    let terms = alg.module().to_named(x);
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|(n, &c)| if c == 1 { n.clone() } else { format!("{c}{n}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn cmd_mc<A: Algebra + ?Sized>(alg: &A, with_pi0: bool, with_witnesses: bool, cap: usize) -> Result<Report> {
    let mut json = json!({ "schema": "plinf.mc/1", "p": alg.field().modulus(), "W": alg.max_degree() });
    let mut text;
    if with_pi0 {
        let p = pi0(alg, cap)?;
        json["mc"] = Value::Array(p.mc.iter().map(|x| named(alg, x)).collect());
        json["pi0"] = Value::Array(
            p.classes
                .iter()
                .map(|c| json!({ "rep": named(alg, &p.mc[c.rep]), "size": c.size, "members": c.members }))
                .collect(),
        );
        json["raw_symmetric"] = json!(p.raw_symmetric);
        json["raw_transitive"] = json!(p.raw_transitive);
        text = format!("{} Maurer-Cartan elements, {} gauge classes\n", p.mc.len(), p.classes.len());
        for c in &p.classes {
            let members: Vec<String> = c.members.iter().map(|&i| show(alg, &p.mc[i])).collect();
            text.push_str(&format!("  {{{}}}\n", members.join(", ")));
        }
        text.push_str(&format!("raw relation symmetric: {}, transitive: {}\n", p.raw_symmetric, p.raw_transitive));
        if with_witnesses {
            json["witnesses"] = Value::Array(
                p.witnesses
                    .iter()
                    .map(|(&(i, j), lambda)| json!({ "alpha": i, "beta": j, "lambda": named(alg, lambda) }))
                    .collect(),
            );
            for (&(i, j), lambda) in &p.witnesses {
                text.push_str(&format!("  {} ~ {} via {}\n", show(alg, &p.mc[i]), show(alg, &p.mc[j]), show(alg, lambda)));
            }
        }
    } else {
        let mc = enumerate_mc(alg, cap)?;
        json["mc"] = Value::Array(mc.iter().map(|x| named(alg, x)).collect());
        text = format!("{} Maurer-Cartan elements\n", mc.len());
        for x in &mc {
            text.push_str(&format!("  {}\n", show(alg, x)));
        }
    }
    Ok(Report { code: EXIT_PASS, json, text })
}

pub fn cmd_generate(
    field: PrimeField,
    kind: GenerateKind,
    w: usize,
    a: usize,
    complex: Option<&ChainComplex>,
    cap: usize,
) -> Result<Report> {
    let alg = match kind {
        GenerateKind::Free => {
            let (module, d) = match complex {
                Some(c) => (c.module().clone(), (0..c.dim()).map(|b| c.differential_basis(b).clone()).collect()),
                None => (GradedModule::new(vec![])?, vec![]),
            };
            let params = FreeParams { max_degree: w, leaf_bound: a, curved: false, cap };
            FreeAlgebra::on_module(field, module, &d, params)?
        }
        GenerateKind::CobarPoint => cobar_point(field, w, a, cap)?,
        GenerateKind::CobarInterval => cobar_interval(field, w, a, cap)?,
    };
    let file = TableAlgebra::export(&alg);
    let text = format!("{} basis vectors, p = {}, W = {w}, A = {a}\n", file.basis.len(), field.modulus());
    Ok(Report { code: EXIT_PASS, json: to_value(&file), text })
}

/// Arity and degree bounds of an operad check.
#[derive(Debug, Clone)]
pub struct OperadBounds {
    pub n: usize,
    pub r: usize,
    pub range: InsertionRange,
    pub corks: bool,
    /// Labels per arity and degree, and the seed, for sampled runs.
    pub sample: Option<(usize, u64)>,
}

impl OperadBounds {
    fn labels(&self, rng: &mut ChaCha8Rng, arity: usize, degree: usize) -> Vec<BETuple> {
        let all = BETuple::all(arity, degree);
        match self.sample {
            Some((k, _)) if k < all.len() => all.choose_multiple(rng, k).cloned().collect(),
            _ => all,
        }
    }
}

fn count_labels(n: usize, r: usize) -> u128 {
    (0..=n).flat_map(|a| (0..=r).map(move |d| BETuple::all(a, d).len() as u128)).sum()
}

pub fn cmd_operad(field: PrimeField, check: OperadCheck, b: &OperadBounds, cap: usize) -> Result<Report> {
    let needed = count_labels(b.n, b.r);
    if needed > cap as u128 {
        return Err(Error::CapExceeded { what: "labels within the bounds".into(), needed, cap: cap as u128 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(b.sample.map_or(0, |s| s.1));
    let mut checked = 0usize;
    let mut failures: Vec<Value> = vec![];
    let mut table: Vec<Value> = vec![];
    match check {
        OperadCheck::Duality => {
            for n in 1..=b.n {
                for k in 0..=b.n {
                    for i in 1..=n {
                        for a in 0..=b.r {
                            for c in 0..=b.r - a {
                                for x in b.labels(&mut rng, n, a) {
                                    for y in b.labels(&mut rng, k, c) {
                                        let comp = partial_compose(&field, &x, &y, i)?;
                                        for z in BETuple::all(n + k - 1, a + c) {
                                            checked += 1;
                                            let dec = partial_decompose(&field, &z, n, k, i)?;
                                            if dec.coeff(&(x.clone(), y.clone())) != comp.coeff(&z) {
                                                failures.push(json!({ "x": to_value(&x), "y": to_value(&y), "z": to_value(&z), "i": i }));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        OperadCheck::Dsquared => {
            for n in 0..=b.n {
                for r in 0..=b.r {
                    for w in b.labels(&mut rng, n, r) {
                        checked += 1;
                        let dd = dual_differential(&field, &w, b.range)
                            .map_linear(&field, |x| dual_differential(&field, x, b.range));
                        if !dd.is_zero() {
                            failures.push(json!({ "label": to_value(&w) }));
                        }
                    }
                }
            }
        }
        OperadCheck::Coleibniz => {
            for m in 0..=b.n {
                for r in 0..=b.r {
                    for w in b.labels(&mut rng, m, r) {
                        for n in 1..=m + 1 {
                            let k = m + 1 - n;
                            if k == 0 && !b.corks {
                                continue;
                            }
                            for i in 1..=n {
                                checked += 1;
                                if !co_leibniz_defect(&field, &w, n, k, i, b.range)?.is_zero() {
                                    failures.push(json!({ "label": to_value(&w), "n": n, "k": k, "i": i }));
                                }
                            }
                        }
                    }
                }
            }
        }
        OperadCheck::Epsilon => {
            for r in 0..=b.r {
                for w in b.labels(&mut rng, b.n, r) {
                    for s in 1..=r + 1 {
                        checked += 1;
                        let value = crate::algebra::signed_repr(&field, epsilon_s(&field, &w, s)?);
                        table.push(json!({ "label": to_value(&w), "s": s, "value": value }));
                    }
                }
            }
        }
    }
    let pass = failures.is_empty();
    let mut json = json!({
        "schema": "plinf.operad/1",
        "check": format!("{check:?}").to_lowercase(),
        "p": field.modulus(),
        "n": b.n,
        "W": b.r,
        "range": to_value(&b.range),
        "checked": checked,
        "pass": pass,
        "failures": failures.len(),
        "counterexamples": failures.iter().take(SHOWN).cloned().collect::<Vec<_>>(),
    });
    if let Some((k, seed)) = b.sample {
        json["sample"] = json!({ "per_bucket": k, "seed": seed });
    }
    let mut text = format!(
        "{}: {} ({} cases, {} failures)\n",
        json["check"].as_str().unwrap_or_default(),
        if pass { "PASS" } else { "FAIL" },
        checked,
        failures.len()
    );
    if check == OperadCheck::Epsilon {
        json["table"] = Value::Array(table.clone());
        for e in &table {
            text.push_str(&format!("  eps_{}{} = {}\n", e["s"], e["label"], e["value"]));
        }
    }
    for f in failures.iter().take(SHOWN) {
        text.push_str(&format!("  {f}\n"));
    }
    Ok(Report { code: if pass { EXIT_PASS } else { EXIT_FAIL }, json, text })
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let outcome = run(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    outcome.code
}
