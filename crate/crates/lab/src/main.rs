//! Command-line front end: evaluation, containment checks, the query and
//! structure transformations, polynomial encodings, reduction constructors,
//! the lemma harness and the bounded counterexample search.
//!
//! Exit codes: 0 = pass/hold, 1 = counterexample found / containment
//! violated, 2 = usage error, 3 = cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bagcq_lab::gen::{GenConfig, GenError};
use bagcq_lab::harness::{check_lemma, search_counterexample, HarnessError, LEMMA_IDS};
use bagcq_lab::text::{
    parse_query, parse_rational, parse_structure, query_to_text, rational_to_text,
    structure_to_text, QueryOptions, TextError,
};

use bagcq_core::eval::{
    apply, check_scaled_containment_at, count_homs_naive, Count, EvalError,
};
use bagcq_core::poly::{poly_to_ucq, PolyError};
use bagcq_core::query::{Cq, QueryError, Term, Ucq};
use bagcq_core::reduce::{
    build_thm1, build_thm2, build_thm3, cor5_compose, pleasantize, Mode, Provenance,
    ReduceError, ReductionInstance,
};
use bagcq_core::sig::Signature;
use bagcq_core::structure::StructureError;
use bagcq_core::transform::{cqize, enumerate_trips, marsify, relativize, XformError};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bagcq", about = "Exact bag-semantics query counting and transformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    #[default]
    Plain,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Count a query against a structure
    Eval {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        /// Use the exhaustive-enumeration oracle instead of the engine
        #[arg(long)]
        naive: bool,
    },
    /// Check r * (qs -> D) <= (qb -> D) at one structure
    Contain {
        /// Scale factor as N or N/D
        #[arg(long, default_value = "1")]
        r: String,
        #[arg(long)]
        qs: PathBuf,
        #[arg(long)]
        qb: PathBuf,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Turn a union of CQs into one CQ watched by an alien clique
    Cqize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed a base structure as the view from Mars
    Marsify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relativize a CQ at a term (variable, @constant or `vertex)
    Relativize {
        #[arg(long)]
        at: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the trips of a structure at a given arity
    Trips {
        #[arg(long)]
        arity: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Encode a polynomial as a union of unary CQs
    Poly2ucq {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a containment instance (or pleasantize a query)
    Reduce {
        #[arg(value_parser = ["thm1", "thm2", "thm3", "cor5", "pleasantize"])]
        kind: String,
        /// Epsilon for thm3 (N or N/D)
        #[arg(long)]
        eps: Option<String>,
        /// Input file(s); thm1/cor5 take two queries, thm2/thm3 two
        /// polynomials, pleasantize one query
        #[arg(long = "in", required = true)]
        input: Vec<PathBuf>,
        /// Output prefix; writes PREFIX.qs.ucq, PREFIX.qb.ucq, PREFIX.manifest
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one registered lemma check over generated inputs
    CheckLemma {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Search small structures for a containment counterexample
    Search {
        #[arg(long)]
        qs: PathBuf,
        #[arg(long)]
        qb: PathBuf,
        /// Scale factor as N or N/D
        #[arg(long, default_value = "1")]
        r: String,
        /// Skip structures interpreting Mars and Venus equally
        #[arg(long)]
        nontrivial: bool,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample budget when the fact space is too large to enumerate
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// List the registered lemma identifiers
    Lemmas,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Xform(#[from] XformError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Xform(XformError::TripSpaceExceeded { .. })
            | CliError::Poly(PolyError::PadTooLarge(_))
            | CliError::Reduce(ReduceError::Poly(PolyError::PadTooLarge(_)))
            | CliError::Harness(HarnessError::Gen(GenError::FactSpaceExceeded { .. }))
            | CliError::Harness(HarnessError::Xform(XformError::TripSpaceExceeded { .. })) => {
                ExitCode::from(3)
            }
            _ => ExitCode::from(2),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(p, content).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Parses two query files and rebases both onto the union of their
/// signatures (arity conflicts are errors).
fn parse_query_pair(a: &Path, b: &Path) -> Result<(Ucq, Ucq), CliError> {
    let qa = parse_query(&read(a)?, None, QueryOptions { allow_aliens: true })?;
    let qb = parse_query(&read(b)?, None, QueryOptions { allow_aliens: true })?;
    let mut rels: Vec<(String, usize)> = Vec::new();
    for (n, arity) in qa.sig().relations().chain(qb.sig().relations()) {
        if let Some((_, prev)) = rels.iter().find(|(name, _)| name == n) {
            if *prev != arity {
                return Err(CliError::Usage(format!(
                    "relation `{n}` has arity {prev} in one query and {arity} in the other"
                )));
            }
        } else {
            rels.push((n.to_string(), arity));
        }
    }
    let consts: Vec<String> = qa
        .sig()
        .constants()
        .chain(qb.sig().constants())
        .map(str::to_string)
        .collect();
    let sig = Signature::new(rels, consts).map_err(TextError::from)?;
    let rebase = |q: &Ucq| -> Result<Ucq, CliError> {
        let disjuncts = q
            .disjuncts()
            .iter()
            .map(|d| Cq::new(sig.clone(), d.atoms().to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ucq::new(disjuncts)?)
    };
    Ok((rebase(&qa)?, rebase(&qb)?))
}

fn parse_term_arg(text: &str) -> Result<Term, CliError> {
    let t = text.trim();
    if let Some(c) = t.strip_prefix('@') {
        return Ok(Term::constant(c));
    }
    if let Some(v) = t.strip_prefix('`') {
        return Ok(Term::vertex(v));
    }
    if t.is_empty() || !t.chars().next().is_some_and(|c| c.is_ascii_lowercase() || c == '_') {
        return Err(CliError::Usage(format!("`{t}` is not a term")));
    }
    Ok(Term::var(t))
}

fn single_cq(q: &Ucq, what: &str) -> Result<Cq, CliError> {
    if q.disjuncts().len() != 1 {
        return Err(CliError::Usage(format!("{what} must be a single CQ")));
    }
    Ok(q.disjuncts()[0].clone())
}

fn manifest(inst: &ReductionInstance) -> String {
    let mut fields: Vec<(String, String)> = Vec::new();
    let theorem = match &inst.provenance {
        Provenance::Theorem1 => "thm1",
        Provenance::Theorem2 => "thm2",
        Provenance::Theorem3 { .. } => "thm3",
        Provenance::Corollary5 => "cor5",
    };
    fields.push(("theorem".into(), format!("\"{theorem}\"")));
    fields.push(("scale".into(), format!("\"{}\"", rational_to_text(&inst.scale))));
    let mode = match inst.mode {
        Mode::AllStructures => "all-structures",
        Mode::NonTrivialOnly => "non-trivial-only",
    };
    fields.push(("mode".into(), format!("\"{mode}\"")));
    if let Provenance::Theorem3 { c, cent, u } = &inst.provenance {
        fields.push(("c".into(), format!("\"{}\"", rational_to_text(c))));
        fields.push(("cent".into(), format!("\"{}\"", rational_to_text(cent))));
        fields.push(("u".into(), format!("\"{u}\"")));
    }
    let body: Vec<String> = fields.iter().map(|(k, v)| format!("  \"{k}\": {v}")).collect();
    format!("{{\n{}\n}}\n", body.join(",\n"))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Eval { query, structure, naive } => {
            let d = parse_structure(&read(&structure)?)?;
            let q = parse_query(&read(&query)?, None, QueryOptions { allow_aliens: true })?;
            let count = if naive {
                let mut total = Count::from(0u32);
                for disjunct in q.disjuncts() {
                    total += count_homs_naive(disjunct, &d)?;
                }
                total
            } else {
                apply(&q, &d)?
            };
            println!("{count}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Contain { r, qs, qb, structure, format } => {
            let d = parse_structure(&read(&structure)?)?;
            let scale = parse_rational(&r)?;
            let (qs, qb) = parse_query_pair(&qs, &qb)?;
            let outcome = check_scaled_containment_at(&scale, &qs, &qb, &d)?;
            let verdict = if outcome.holds { "HOLDS" } else { "VIOLATED" };
            match format {
                OutputFormat::Plain => {
                    println!("{verdict}");
                    println!("scale: {}", rational_to_text(&scale));
                    println!("small: {}", outcome.small_count);
                    println!("big: {}", outcome.big_count);
                }
                OutputFormat::Tsv => {
                    println!(
                        "{verdict}\t{}\t{}\t{}",
                        rational_to_text(&scale),
                        outcome.small_count,
                        outcome.big_count
                    );
                }
            }
            Ok(if outcome.holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Cqize { input, out } => {
            let q = parse_query(&read(&input)?, None, QueryOptions::default())?;
            let cq = cqize(&q)?;
            write_out(out.as_deref(), &query_to_text(&Ucq::from_cq(cq), true))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Marsify { input, out } => {
            let d = parse_structure(&read(&input)?)?;
            let m = marsify(&d)?;
            write_out(out.as_deref(), &structure_to_text(&m))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Relativize { at, input, out } => {
            let q = parse_query(&read(&input)?, None, QueryOptions::default())?;
            let cq = single_cq(&q, "relativize input")?;
            let x = parse_term_arg(&at)?;
            let rel = relativize(&x, &cq)?;
            write_out(out.as_deref(), &query_to_text(&Ucq::from_cq(rel), true))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Trips { arity, input, format } => {
            let d = parse_structure(&read(&input)?)?;
            let trips = enumerate_trips(arity, &d)?;
            for (trip, class) in &trips {
                let class_text = match class {
                    bagcq_core::transform::TripClass::AllVenus => "all-venus".to_string(),
                    bagcq_core::transform::TripClass::OneAway { alien, planet } => {
                        format!("one-away x{alien}->{planet}")
                    }
                    bagcq_core::transform::TripClass::TwoPlusAway { destinations } => {
                        format!(
                            "two-plus-away {{{}}}",
                            destinations.iter().cloned().collect::<Vec<_>>().join(",")
                        )
                    }
                };
                match format {
                    OutputFormat::Plain => {
                        let images: Vec<String> = trip
                            .images()
                            .iter()
                            .enumerate()
                            .map(|(i, p)| format!("x{}->{p}", i + 1))
                            .collect();
                        println!("{} [{class_text}]", images.join(" "));
                    }
                    OutputFormat::Tsv => {
                        println!("{}\t{class_text}", trip.images().join("\t"));
                    }
                }
            }
            if format == OutputFormat::Plain {
                println!("total: {}", trips.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Poly2ucq { input, out } => {
            let p = bagcq_lab::text::parse_polynomial(&read(&input)?)?;
            let u = poly_to_ucq(&p)?;
            write_out(out.as_deref(), &query_to_text(&u, true))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce { kind, eps, input, out } => {
            let expect_inputs = |n: usize| -> Result<(), CliError> {
                if input.len() != n {
                    return Err(CliError::Usage(format!(
                        "reduce {kind} takes exactly {n} --in file(s), got {}",
                        input.len()
                    )));
                }
                Ok(())
            };
            if kind == "pleasantize" {
                expect_inputs(1)?;
                let q = parse_query(&read(&input[0])?, None, QueryOptions::default())?;
                let p = pleasantize(&q)?;
                let path = out.with_extension("ucq");
                write_out(Some(&path), &query_to_text(&p, true))?;
                eprintln!("wrote {}", path.display());
                return Ok(ExitCode::SUCCESS);
            }
            let inst = match kind.as_str() {
                "thm1" => {
                    expect_inputs(2)?;
                    let (qs, qb) = parse_query_pair(&input[0], &input[1])?;
                    let psi_s = single_cq(&qs, "the small query of thm1")?;
                    build_thm1(&psi_s, &qb)?
                }
                "thm2" => {
                    expect_inputs(2)?;
                    let ps = bagcq_lab::text::parse_polynomial(&read(&input[0])?)?;
                    let pb = bagcq_lab::text::parse_polynomial(&read(&input[1])?)?;
                    build_thm2(&ps, &pb)?
                }
                "thm3" => {
                    expect_inputs(2)?;
                    let eps_text = eps
                        .ok_or_else(|| CliError::Usage("reduce thm3 requires --eps".to_string()))?;
                    let eps = parse_rational(&eps_text)?;
                    let ps = bagcq_lab::text::parse_polynomial(&read(&input[0])?)?;
                    let pb = bagcq_lab::text::parse_polynomial(&read(&input[1])?)?;
                    build_thm3(&ps, &pb, &eps)?
                }
                "cor5" => {
                    expect_inputs(2)?;
                    let (qs, qb) = parse_query_pair(&input[0], &input[1])?;
                    let beta_s = single_cq(&qs, "the small query of cor5")?;
                    let beta_b = single_cq(&qb, "the big query of cor5")?;
                    cor5_compose(&beta_s, &beta_b)?
                }
                other => return Err(CliError::Usage(format!("unknown reduction `{other}`"))),
            };
            let qs_path = out.with_extension("qs.ucq");
            let qb_path = out.with_extension("qb.ucq");
            let mf_path = out.with_extension("manifest");
            write_out(Some(&qs_path), &query_to_text(&inst.qs, true))?;
            write_out(Some(&qb_path), &query_to_text(&inst.qb, true))?;
            write_out(Some(&mf_path), &manifest(&inst))?;
            eprintln!(
                "wrote {}, {}, {}",
                qs_path.display(),
                qb_path.display(),
                mf_path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckLemma { name, seed, max_size, samples, format } => {
            let cfg = GenConfig::new(Signature::of(&[], &[]).expect("empty signature"))
                .max_vertices(max_size)
                .seed(seed)
                .samples(samples);
            eprintln!("cfg: lemma={name} seed={seed} max-size={max_size} samples={samples}");
            let report = check_lemma(&name, &cfg)?;
            match format {
                OutputFormat::Plain => {
                    println!(
                        "{}: {}/{} cases passed in {:.3}s",
                        report.lemma,
                        report.cases_passed,
                        report.cases_run,
                        report.elapsed.as_secs_f64()
                    );
                    if let Some(cex) = &report.first_counterexample {
                        println!("first counterexample:\n{cex}");
                    }
                }
                OutputFormat::Tsv => {
                    println!(
                        "{}\t{}\t{}\t{:.3}\t{}",
                        report.lemma,
                        report.cases_passed,
                        report.cases_run,
                        report.elapsed.as_secs_f64(),
                        report.first_counterexample.is_some()
                    );
                }
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Search { qs, qb, r, nontrivial, max_size, seed, samples, format } => {
            let scale = parse_rational(&r)?;
            let (qs, qb) = parse_query_pair(&qs, &qb)?;
            let inst = ReductionInstance {
                qs,
                qb,
                scale,
                mode: if nontrivial { Mode::NonTrivialOnly } else { Mode::AllStructures },
                provenance: Provenance::Theorem1,
            };
            eprintln!(
                "cfg: search seed={seed} max-size={max_size} samples={samples} nontrivial={nontrivial}"
            );
            let cfg = GenConfig::new(inst.qs.sig().clone())
                .max_vertices(max_size)
                .seed(seed)
                .samples(samples);
            match search_counterexample(&inst, &cfg)? {
                Some(hit) => {
                    match format {
                        OutputFormat::Plain => {
                            println!("COUNTEREXAMPLE");
                            println!("small: {}", hit.small_count);
                            println!("big: {}", hit.big_count);
                            print!("{}", structure_to_text(&hit.structure));
                        }
                        OutputFormat::Tsv => {
                            println!(
                                "COUNTEREXAMPLE\t{}\t{}\t{}",
                                hit.small_count,
                                hit.big_count,
                                structure_to_text(&hit.structure).replace('\n', ";")
                            );
                        }
                    }
                    Ok(ExitCode::from(1))
                }
                None => {
                    match format {
                        OutputFormat::Plain => println!("NONE FOUND (within bounds)"),
                        OutputFormat::Tsv => println!("NONE"),
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Lemmas => {
            for id in LEMMA_IDS {
                println!("{id}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
