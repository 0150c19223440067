//! `kromlab` command-line front end.
//!
//! Exit codes: 0 success / true / equivalent, 1 false / counterexample,
//! 2 input or evaluation error, 3 resource limit exceeded, 64 usage error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kromlab::eval::{ground, Evaluator, Limits, Route};
use kromlab::harness::{enumerate_structures, equiv_test_with, random_formula, Profile, Verdict};
use kromlab::hierarchy::{encode_qbf, interpret_structure, phi_formula_with, translate_sigma_k};
use kromlab::textio::{emit_qdimacs, parse_qbf, print_structure};
use kromlab::transforms::{
    drop_innermost_universal_traced, expand_exists_r_traced, prenex_cnf, skolemize_fo,
    strip_universal_blocks_traced, RewriteTrace,
};
use kromlab::{classify, parse_formula, parse_structure, parse_vocabulary, Error, FragmentTag, SoFormula, Vocabulary};
use serde_json::json;

const EXIT_FALSE: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Largest interpreted universe enumerated for the translation audit.
const AUDIT_BUDGET: u128 = 1 << 16;

#[derive(Parser, Debug)]
#[command(name = "kromlab", version, about = "Second-order Krom logics over finite structures")]
struct Cli {
    /// Ground variables a brute-force evaluation may enumerate (overrides KROMLAB_LIMIT_VARS).
    #[arg(long, global = true)]
    limit_vars: Option<usize>,
    /// Assignments per second-order block (overrides KROMLAB_LIMIT_ASSIGN).
    #[arg(long, global = true)]
    limit_assign: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide `structure ⊨ formula`; prints true or false.
    Check {
        formula: PathBuf,
        structure: PathBuf,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
        /// Print route counters to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Print the fragment of a formula.
    Classify { formula: PathBuf },
    /// Ground a clausal formula over a structure and write QDIMACS.
    Ground {
        formula: PathBuf,
        structure: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply a fragment rewrite and write the result as `.sof`.
    Transform {
        #[arg(long, value_enum)]
        rule: Rule,
        formula: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print the rewrite trace to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Translate `Q₁X₁ ⋯ ∀X_k φ` into a Krom formula with guards.
    Translate {
        #[arg(long, value_enum)]
        target: Target,
        formula: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// JSON-lines audit file; defaults to `<output>.audit.jsonl`, or
        /// stderr without `--output`.
        #[arg(long)]
        audit: Option<PathBuf>,
        /// σ-structure whose interpretation is counted in the audit; defaults
        /// to the two-element structure with empty relations.
        #[arg(long)]
        audit_structure: Option<PathBuf>,
        /// Write the formula Θ before normalization instead of the output.
        #[arg(long)]
        emit_theta: bool,
    },
    /// Encode a prefixed DNF QBF as a structure plus the matching formula.
    EncodeQbf {
        qbf: PathBuf,
        /// Write `<prefix>.fst` and `<prefix>.sof` instead of printing both
        /// to stdout separated by a `---` line.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare two formulas on all structures up to a size.
    Equiv {
        lhs: PathBuf,
        rhs: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Extra symbols to range over besides those of the formulas.
        #[arg(long)]
        vocab: Option<PathBuf>,
    },
    /// Stream all structures of a given size as `.fst` blocks.
    Enumerate {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        size: usize,
        /// Refuse spaces larger than this.
        #[arg(long, default_value_t = 1 << 20)]
        max_count: u128,
    },
    /// Print a seeded random formula of a fragment.
    Random {
        #[arg(long, value_enum)]
        fragment: FragmentArg,
        /// Alternation count for the Krom fragments.
        #[arg(long, default_value_t = 1)]
        blocks: usize,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, default_value_t = 3)]
        clauses: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RouteArg {
    Auto,
    Tree,
    Bruteforce,
    Specialized,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Rule {
    /// Eliminate the innermost universal block.
    DropUniversal,
    /// Eliminate all trailing universal blocks.
    StripUniversal,
    /// Remove guards from an existential formula.
    ExpandGuards,
    /// Skolemize a first-order sentence into `∃Y(φ1 ∧ φ2 ∧ φ3)`.
    Skolemize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Target {
    KromR,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FragmentArg {
    FoCnf,
    SigmaKrom,
    PiKrom,
    SigmaKromR,
    PiKromR,
    Ekrom,
}

enum Failure {
    Usage(String),
    Lib(String, Error),
    Io(String, io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(String::new(), e)
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.display().to_string(), e))
}

fn with_path<T>(path: &Path, r: kromlab::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Lib(path.display().to_string(), e))
}

fn load_formula(path: &Path) -> Result<SoFormula, Failure> {
    with_path(path, parse_formula(&read(path)?))
}

fn load_structure(path: &Path) -> Result<kromlab::FiniteStructure, Failure> {
    with_path(path, parse_structure(&read(path)?))
}

fn load_vocabulary(path: &Path) -> Result<Vocabulary, Failure> {
    with_path(path, parse_vocabulary(&read(path)?))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(p.display().to_string(), e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io("stdout".into(), e)),
    }
}

fn print_trace(trace: &RewriteTrace) {
    for step in &trace.steps {
        eprintln!("{} [{}]: {} => {}", step.rule, step.target, step.before, step.after);
    }
}

fn limits(cli: &Cli) -> Result<Limits, Failure> {
    let mut l = Limits::from_env().map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(v) = cli.limit_vars {
        l.max_vars = v;
    }
    if let Some(a) = cli.limit_assign {
        l.max_assignments = a;
    }
    Ok(l)
}

fn run(cli: &Cli) -> Outcome {
    let lim = limits(cli)?;
    match &cli.command {
        Command::Check { formula, structure, route, stats } => {
            let f = load_formula(formula)?;
            let s = load_structure(structure)?;
            let route = match route {
                RouteArg::Auto => Route::Auto,
                RouteArg::Tree => Route::Tree,
                RouteArg::Bruteforce => Route::GroundBruteforce,
                RouteArg::Specialized => Route::Specialized,
            };
            let mut ev = Evaluator::new(lim);
            let verdict = ev.check_route(&f, &s, route)?;
            if *stats {
                eprintln!("{:?}", ev.stats);
            }
            write_out(None, if verdict { "true" } else { "false" })?;
            Ok(if verdict { 0 } else { EXIT_FALSE })
        }
        Command::Classify { formula } => {
            let f = load_formula(formula)?;
            write_out(None, &classify(&f)?.to_string())?;
            Ok(0)
        }
        Command::Ground { formula, structure, output } => {
            let f = load_formula(formula)?;
            let s = load_structure(structure)?;
            let c = f
                .as_clausal()
                .ok_or_else(|| Failure::Lib(formula.display().to_string(), not_clausal()))?;
            let (q, index) = ground(c, &s)?;
            write_out(output.as_deref(), &emit_qdimacs(&q, &index)?)?;
            Ok(0)
        }
        Command::Transform { rule, formula, output, trace } => {
            let f = load_formula(formula)?;
            let clausal = || {
                f.as_clausal()
                    .ok_or_else(|| Failure::Lib(formula.display().to_string(), not_clausal()))
            };
            let (out, steps) = match rule {
                Rule::DropUniversal => {
                    let (o, t) = drop_innermost_universal_traced(clausal()?)?;
                    (SoFormula::Clausal(o), t)
                }
                Rule::StripUniversal => {
                    let (o, t) = strip_universal_blocks_traced(clausal()?)?;
                    (SoFormula::Clausal(o), t)
                }
                Rule::ExpandGuards => {
                    let (mut ds, t) = expand_exists_r_traced(clausal()?)?;
                    let o = if ds.len() == 1 { SoFormula::Clausal(ds.remove(0)) } else { SoFormula::Disjunction(ds) };
                    (o, t)
                }
                Rule::Skolemize => {
                    let p = prenex_cnf(&f.to_expr())?;
                    (SoFormula::General(skolemize_fo(&p)?.to_expr()), RewriteTrace::default())
                }
            };
            if *trace {
                print_trace(&steps);
            }
            write_out(output.as_deref(), &out.to_string())?;
            Ok(0)
        }
        Command::Translate { target: Target::KromR, formula, output, audit, audit_structure, emit_theta } => {
            let f = load_formula(formula)?;
            let t = translate_sigma_k(&f)?;
            if *emit_theta {
                write_out(output.as_deref(), &t.theta.to_string())?;
            } else {
                write_out(output.as_deref(), &t.output.to_string())?;
            }
            let interp = &t.interpretation;
            let mut lines = vec![json!({
                "d": interp.d,
                "m": interp.m,
                "g": interp.g,
                "x_len": interp.x_len,
                "k": interp.k,
                "theta_clauses": t.theta_clausal().matrix.len(),
                "delta_types": t.delta.types.len(),
                "fragment": classify(&t.output)?.to_string(),
            })];
            let s = match audit_structure {
                Some(p) => load_structure(p)?,
                None => enumerate_structures(&t.intermediate.sigma, 2, u128::MAX)?.get(0),
            };
            match interpret_structure(interp, &s, AUDIT_BUDGET) {
                Ok(image) => {
                    for (pi, count) in image.counts(interp.k) {
                        lines.push(json!({ "pi": pi, "structure_size": s.size(), "tuples": count.to_string() }));
                    }
                }
                Err(e) if e.is_resource() => {
                    lines.push(json!({ "pi": null, "skipped": e.to_string() }));
                }
                Err(e) => return Err(e.into()),
            }
            let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
            let audit_path = audit.clone().or_else(|| {
                output.as_ref().map(|o| {
                    let mut p = o.clone().into_os_string();
                    p.push(".audit.jsonl");
                    PathBuf::from(p)
                })
            });
            match audit_path {
                Some(p) => fs::write(&p, text).map_err(|e| Failure::Io(p.display().to_string(), e))?,
                None => eprint!("{text}"),
            }
            Ok(0)
        }
        Command::EncodeQbf { qbf, output } => {
            let q = with_path(qbf, parse_qbf(&read(qbf)?))?;
            let enc = encode_qbf(&q)?;
            let structure = print_structure(&enc.structure);
            let phi = SoFormula::Clausal(phi_formula_with(q.k(), enc.first)).to_string();
            match output {
                Some(prefix) => {
                    write_out(Some(&prefix.with_extension("fst")), &structure)?;
                    write_out(Some(&prefix.with_extension("sof")), &phi)?;
                }
                None => write_out(None, &format!("{structure}---\n{phi}"))?,
            }
            Ok(0)
        }
        Command::Equiv { lhs, rhs, max_size, vocab } => {
            let l = load_formula(lhs)?;
            let r = load_formula(rhs)?;
            let mut v = with_path(lhs, l.signature())?;
            v = v.union(&with_path(rhs, r.signature())?)?;
            if let Some(p) = vocab {
                v = v.union(&load_vocabulary(p)?)?;
            }
            let report = equiv_test_with(&l, &r, &v, *max_size, &lim, 1 << 24)?;
            match &report.verdict {
                Verdict::EquivalentUpTo(n) => {
                    write_out(None, &format!("equivalent-up-to-bound {n}"))?;
                    eprintln!("{} structures checked", report.tested);
                    Ok(0)
                }
                Verdict::Counterexample(c) => {
                    write_out(
                        None,
                        &format!("# counterexample: lhs {}, rhs {}\n{}", c.lhs, c.rhs, print_structure(&c.structure)),
                    )?;
                    Ok(EXIT_FALSE)
                }
            }
        }
        Command::Enumerate { vocab, size, max_count } => {
            let v = load_vocabulary(vocab)?;
            let space = enumerate_structures(&v, *size, *max_count)?;
            let stdout = io::stdout();
            let mut out = io::BufWriter::new(stdout.lock());
            for (i, s) in space.iter().enumerate() {
                let sep = if i == 0 { "" } else { "\n" };
                if write!(out, "{sep}{}", print_structure(&s)).is_err() {
                    // downstream closed the pipe
                    return Ok(0);
                }
            }
            out.flush().map_err(|e| Failure::Io("stdout".into(), e))?;
            Ok(0)
        }
        Command::Random { fragment, blocks, vocab, clauses, seed } => {
            let v = load_vocabulary(vocab)?;
            let k = *blocks;
            let tag = match fragment {
                FragmentArg::FoCnf => FragmentTag::FoUniversalCnf,
                FragmentArg::SigmaKrom => FragmentTag::SigmaKrom(k),
                FragmentArg::PiKrom => FragmentTag::PiKrom(k),
                FragmentArg::SigmaKromR => FragmentTag::SigmaKromR(k),
                FragmentArg::PiKromR => FragmentTag::PiKromR(k),
                FragmentArg::Ekrom => FragmentTag::SoEkrom,
            };
            let mut p = Profile::new(tag.clone(), v, *clauses, *seed);
            if tag == FragmentTag::FoUniversalCnf {
                p = p.with_so_vars(0);
            }
            write_out(None, &random_formula(&p)?.to_string())?;
            Ok(0)
        }
    }
}

fn not_clausal() -> Error {
    Error::Structural("this command needs a clausal formula".into())
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("kromlab: {}", one_line(&msg));
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("kromlab: {path}: {}", one_line(&e.to_string()));
            ExitCode::from(EXIT_ERROR)
        }
        Err(Failure::Lib(path, e)) => {
            let prefix = if path.is_empty() { String::new() } else { format!("{path}: ") };
            eprintln!("kromlab: {prefix}{}", one_line(&e.to_string()));
            ExitCode::from(if e.is_resource() { EXIT_RESOURCE } else { EXIT_ERROR })
        }
    }
}
