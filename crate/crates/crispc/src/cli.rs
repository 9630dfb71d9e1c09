//! Batch command surface.
//!
//! Exit codes: 0 success, 1 usage, 2 parse/validation, 3 semantic rejection
//! (Zadeh reduction, qualified restrictions without a suitable pass, name
//! collisions), 4 bounded search that ran out of budget.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchConfig};
use crate::chain::{Chain, Degree, Family};
use crate::crispify::{self, CrispifyError, CrispifyOptions, CutTable};
use crate::model::{self, FuzzyOntology};
use crate::normalize::{self, NormalizeError};
use crate::oracle::{self, SearchOptions, SearchOutcome};
use crate::queries::{self, Query};
use crate::textio;

#[derive(Parser)]
#[command(
    name = "crispc",
    version,
    about = "Compiles finitely valued fuzzy ontologies and queries to classical ones"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Io {
    /// Input file.
    #[arg(short = 'i', long)]
    input: PathBuf,
    /// Output file; `-` writes to standard output.
    #[arg(short = 'o', long)]
    output: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rewrite every axiom into the bounded-occurrence normal form.
    Normalize {
        #[command(flatten)]
        io: Io,
        /// Normalize even axioms with at most three fuzzy-name occurrences.
        #[arg(long)]
        no_skip_small: bool,
    },
    /// Reduce a fuzzy ontology to a classical one over cut names.
    Crispify {
        #[command(flatten)]
        io: Io,
        /// Reduce the input as is, without normalizing first.
        #[arg(long)]
        no_normalize: bool,
        /// Eliminate qualified number restrictions on both sides, emitting
        /// role disjunctions.
        #[arg(long, conflicts_with = "legacy_qnr")]
        extended_roles: bool,
        /// Apply the unsound historical concept-partition encoding
        /// (demonstration only; output axioms are flagged on stderr).
        #[arg(long)]
        legacy_qnr: bool,
        /// Reduce simple role inclusions through composition with the
        /// universal role, as a comparison point.
        #[arg(long)]
        literal_role_inclusion: bool,
        /// Stop after the number-restriction passes and write the fuzzy
        /// ontology instead of reducing it.
        #[arg(long)]
        emit_fuzzy: bool,
        /// Write an `output-axiom-index → source` map to this file.
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Translate a threshold/fuzzy/scoring query into a classical (U)CQ.
    TranslateQuery {
        #[command(flatten)]
        io: Io,
        /// Ontology providing the chain, signature, and crisp declarations.
        #[arg(long)]
        ontology: PathBuf,
        /// Lower bound: a chain degree for fuzzy queries, any non-negative
        /// rational for scoring queries.
        #[arg(long)]
        degree: Option<String>,
        /// Emit every qualifying degree tuple instead of only the minimal ones.
        #[arg(long)]
        all_tuples: bool,
    },
    /// Evaluate a fixture interpretation: model check and query verdicts.
    Eval {
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long)]
        interp: PathBuf,
        #[arg(long)]
        query: Option<PathBuf>,
        #[arg(long)]
        degree: Option<String>,
    },
    /// Exhaustive bounded model search.
    SearchModel {
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_domain: usize,
        /// Search steps; defaults to CRISPC_BUDGET or 10^7.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Generate a university-style benchmark ontology.
    Gen {
        /// Output file; `-` writes to standard output.
        #[arg(short = 'o', long)]
        output: String,
        #[arg(long, default_value_t = 1)]
        units: u32,
        #[arg(long, default_value_t = 7)]
        chain: u32,
        #[arg(long, default_value = "lukasiewicz")]
        family: String,
        /// Percentage of names declared crisp.
        #[arg(long, default_value_t = 0)]
        crisp: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        divisor: u32,
    },
    /// Generate the nested ⊓/∃ family that exhibits unnormalized blow-up.
    GenNested {
        #[arg(short = 'o', long)]
        output: String,
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value_t = 4)]
        chain: u32,
        #[arg(long, default_value = "lukasiewicz")]
        family: String,
    },
    /// Occurrence counts as CSV; with --crispify, reduced sizes for both
    /// normalization variants.
    Stats {
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(long)]
        crispify: bool,
        /// Re-embed the ontology's degrees onto a chain of this size first.
        #[arg(long)]
        chain: Option<u32>,
    },
}

enum CliError {
    Usage(String),
    Data(String),
    Semantic(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Semantic(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Semantic(m) => m,
        }
    }
}

fn data_err(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {msg}", path.display()))
}

fn classify_crispify(path: &Path, e: CrispifyError) -> CliError {
    match e {
        CrispifyError::InvalidInput(_) => data_err(path, e),
        _ => CliError::Semantic(format!("{}: {e}", path.display())),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| data_err(path, e))
}

fn write_out(target: &str, content: &str) -> Result<(), CliError> {
    if target == "-" {
        print!("{content}");
        Ok(())
    } else {
        fs::write(target, content).map_err(|e| CliError::Data(format!("{target}: {e}")))
    }
}

/// Parse, eliminate strict bounds, and validate.
fn load_ontology(path: &Path) -> Result<FuzzyOntology, CliError> {
    let text = read(path)?;
    let raw = textio::parse_ontology(&text).map_err(|e| data_err(path, e))?;
    let onto = model::rewrite_strict(&raw).map_err(|e| data_err(path, e))?;
    let report = model::validate(&onto);
    if !report.is_empty() {
        let lines: Vec<String> = report.iter().map(|v| v.to_string()).collect();
        return Err(data_err(path, lines.join("; ")));
    }
    Ok(onto)
}

fn parse_family(name: &str) -> Result<Family, CliError> {
    match name {
        "goedel" => Ok(Family::Goedel),
        "lukasiewicz" => Ok(Family::Lukasiewicz),
        "zadeh" => Ok(Family::Zadeh),
        other => Err(CliError::Usage(format!(
            "unknown family '{other}' (custom chains come from files)"
        ))),
    }
}

fn parse_rational(text: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("bad degree '{text}'"));
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok((n, d))
    } else if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 12 {
            return Err(bad());
        }
        let scale = 10i64.pow(frac.len() as u32);
        let i: i64 = if int.is_empty() {
            0
        } else {
            int.trim().parse().map_err(|_| bad())?
        };
        let f: i64 = frac.parse().map_err(|_| bad())?;
        Ok((i * scale + f, scale))
    } else {
        let n: i64 = text.trim().parse().map_err(|_| bad())?;
        Ok((n, 1))
    }
}

fn parse_chain_degree(text: &str, chain: &Chain) -> Result<Degree, CliError> {
    let (num, den) = parse_rational(text)?;
    let scaled = num * i64::from(chain.size() - 1);
    if num < 0 || scaled % den != 0 || scaled / den >= i64::from(chain.size()) {
        return Err(CliError::Data(format!(
            "degree {text} not on chain of {}",
            chain.size()
        )));
    }
    Ok(Degree((scaled / den) as u32))
}

fn run_cmd(cmd: Cmd) -> Result<i32, CliError> {
    match cmd {
        Cmd::Normalize { io, no_skip_small } => {
            let onto = load_ontology(&io.input)?;
            let out = normalize::normalize(&onto, !no_skip_small).map_err(|e: NormalizeError| {
                CliError::Semantic(format!("{}: {e}", io.input.display()))
            })?;
            write_out(&io.output, &textio::print_ontology(&out.onto))?;
            Ok(0)
        }
        Cmd::Crispify {
            io,
            no_normalize,
            extended_roles,
            legacy_qnr,
            literal_role_inclusion,
            emit_fuzzy,
            provenance,
        } => {
            let mut onto = load_ontology(&io.input)?;
            if no_normalize && onto.chain.size() == 2 {
                return Err(CliError::Semantic(format!(
                    "{}: input is already two-valued; refusing to re-crispify without normalization",
                    io.input.display()
                )));
            }
            if legacy_qnr {
                let (out, notes) = crispify::legacy_partition_reduction(&onto)
                    .map_err(|e| classify_crispify(&io.input, e))?;
                for note in &notes {
                    eprintln!("{note}");
                }
                onto = out;
            } else if extended_roles {
                onto = crispify::eliminate_qualified_atleast_lhs_extended(&onto)
                    .map_err(|e| classify_crispify(&io.input, e))?;
            } else if onto.axioms().any(|ax| match ax {
                model::Axiom::Concept(a) => a.concept.contains_qualified(),
                model::Axiom::Gci(g) => g.lhs.contains_qualified() || g.rhs.contains_qualified(),
                _ => false,
            }) {
                onto = crispify::eliminate_qualified_atleast_rhs(&onto)
                    .map_err(|e| classify_crispify(&io.input, e))?;
            }
            if emit_fuzzy {
                write_out(&io.output, &textio::print_ontology(&onto))?;
                return Ok(0);
            }
            let opts = CrispifyOptions {
                normalize: !no_normalize,
                extended_roles,
                literal_role_inclusion,
                ..Default::default()
            };
            let out = crispify::crispify(&onto, &opts).map_err(|e| classify_crispify(&io.input, e))?;
            write_out(&io.output, &textio::print_classical(&out.classical))?;
            if let Some(p) = provenance {
                let mut text = out.provenance.join("\n");
                text.push('\n');
                fs::write(&p, text).map_err(|e| data_err(&p, e))?;
            }
            Ok(0)
        }
        Cmd::TranslateQuery {
            io,
            ontology,
            degree,
            all_tuples,
        } => {
            let onto = load_ontology(&ontology)?;
            let text = read(&io.input)?;
            let query = textio::parse_query(&text, &onto).map_err(|e| data_err(&io.input, e))?;
            let cuts = CutTable::build(&onto).map_err(|e| classify_crispify(&ontology, e))?;
            let ucq = match query {
                Query::Threshold(q) => {
                    let cq = queries::kappa_threshold(&q, &cuts);
                    queries::Ucq::single(q.vars.clone(), q.dist.clone(), cq)
                }
                Query::Fuzzy(q) => {
                    let d =
                        degree.ok_or_else(|| CliError::Usage("fuzzy queries need --degree".into()))?;
                    let d = parse_chain_degree(&d, &onto.chain)?;
                    queries::kappa_fuzzy(&q, d, &onto, &cuts, all_tuples)
                        .map_err(|e| CliError::Semantic(e.to_string()))?
                }
                Query::Scoring(q) => {
                    let d =
                        degree.ok_or_else(|| CliError::Usage("scoring queries need --degree".into()))?;
                    let (num, den) = parse_rational(&d)?;
                    let bound = num_rational::Rational64::new(num, den);
                    queries::kappa_scoring(&q, bound, &onto, &cuts, all_tuples)
                        .map_err(|e| CliError::Semantic(e.to_string()))?
                }
                Query::Ucq(_) => {
                    return Err(CliError::Data(format!(
                        "{}: query is already classical",
                        io.input.display()
                    )))
                }
            };
            write_out(&io.output, &textio::print_ucq(&ucq, &cuts.classical_sig))?;
            Ok(0)
        }
        Cmd::Eval {
            ontology,
            interp,
            query,
            degree,
        } => {
            let onto = load_ontology(&ontology)?;
            let text = read(&interp)?;
            let i = textio::parse_interp(&text, &onto).map_err(|e| data_err(&interp, e))?;
            let model = oracle::is_model(&i, &onto);
            println!("model: {}", if model { "yes" } else { "no" });
            let Some(qpath) = query else {
                return Ok(0);
            };
            let qtext = read(&qpath)?;
            let parsed = textio::parse_query(&qtext, &onto).map_err(|e| data_err(&qpath, e))?;
            let inds: Vec<model::IndId> = (0..onto.sig.inds.len() as u32).map(model::IndId).collect();
            let tuples = |k: usize| -> Vec<Vec<model::IndId>> {
                let mut out = vec![Vec::new()];
                for _ in 0..k {
                    out = out
                        .into_iter()
                        .flat_map(|t| {
                            inds.iter().map(move |&a| {
                                let mut t2 = t.clone();
                                t2.push(a);
                                t2
                            })
                        })
                        .collect();
                }
                out
            };
            let name_tuple = |t: &[model::IndId]| -> String {
                let names: Vec<&str> = t.iter().map(|a| onto.sig.ind_name(*a)).collect();
                format!("({})", names.join(","))
            };
            match parsed {
                Query::Threshold(q) => {
                    for t in tuples(q.dist.len()) {
                        let b = queries::instantiate_threshold(&q, &t, onto.chain.top())
                            .map_err(|e| CliError::Data(e.to_string()))?;
                        let sat = oracle::query_sat(&i, &onto, &b)
                            .map_err(|e| CliError::Data(e.to_string()))?;
                        if q.dist.is_empty() {
                            println!("entailed: {}", if sat { "yes" } else { "no" });
                        } else if sat {
                            println!("answer {}", name_tuple(&t));
                        }
                    }
                }
                Query::Fuzzy(q) => {
                    let bound = degree
                        .as_deref()
                        .map(|d| parse_chain_degree(d, &onto.chain))
                        .transpose()?;
                    for t in tuples(q.dist.len()) {
                        let b = queries::instantiate_fuzzy(&q, &t)
                            .map_err(|e| CliError::Data(e.to_string()))?;
                        let d = oracle::fuzzy_degree(&i, &onto, &b)
                            .map_err(|e| CliError::Data(e.to_string()))?;
                        let show = match bound {
                            Some(min) => d >= min,
                            None => !d.is_zero() || q.dist.is_empty(),
                        };
                        if show {
                            if q.dist.is_empty() {
                                println!("degree: {}", textio::fmt_degree(&onto.chain, d));
                            } else {
                                println!(
                                    "answer {} degree {}",
                                    name_tuple(&t),
                                    textio::fmt_degree(&onto.chain, d)
                                );
                            }
                        }
                    }
                }
                Query::Scoring(q) => {
                    let bound = degree
                        .as_deref()
                        .map(parse_rational)
                        .transpose()?
                        .map(|(n, d)| num_rational::Rational64::new(n, d));
                    for t in tuples(q.dist.len()) {
                        let b = queries::instantiate_scoring(&q, &t)
                            .map_err(|e| CliError::Data(e.to_string()))?;
                        let s = oracle::scoring_best(&i, &onto, &b)
                            .map_err(|e| CliError::Data(e.to_string()))?;
                        let show = bound.is_none_or(|min| s >= min);
                        if show {
                            let rendered = if *s.denom() == 1 {
                                s.numer().to_string()
                            } else {
                                format!("{}/{}", s.numer(), s.denom())
                            };
                            if q.dist.is_empty() {
                                println!("score: {rendered}");
                            } else {
                                println!("answer {} score {rendered}", name_tuple(&t));
                            }
                        }
                    }
                }
                Query::Ucq(_) => {
                    return Err(CliError::Data(format!(
                        "{}: evaluate fuzzy-side queries against fuzzy interpretations",
                        qpath.display()
                    )))
                }
            }
            Ok(0)
        }
        Cmd::SearchModel {
            ontology,
            max_domain,
            budget,
        } => {
            let onto = load_ontology(&ontology)?;
            let budget = budget
                .or_else(|| std::env::var("CRISPC_BUDGET").ok().and_then(|v| v.parse().ok()))
                .unwrap_or(10_000_000);
            let opts = SearchOptions {
                max_domain,
                budget,
                mode: Default::default(),
            };
            match oracle::search_model(&onto, &opts).map_err(|e| CliError::Usage(e.to_string()))? {
                SearchOutcome::Found(i) => {
                    println!("found domain={}", i.domain_size);
                    print!("{}", textio::print_interp(&i, &onto));
                    Ok(0)
                }
                SearchOutcome::Exhausted => {
                    println!("exhausted max-domain={max_domain}");
                    Ok(0)
                }
                SearchOutcome::BudgetExceeded => {
                    println!("budget-exceeded budget={budget}");
                    Ok(4)
                }
            }
        }
        Cmd::Gen {
            output,
            units,
            chain,
            family,
            crisp,
            seed,
            divisor,
        } => {
            if crisp > 100 {
                return Err(CliError::Usage("--crisp is a percentage".into()));
            }
            let cfg = BenchConfig {
                universities: units,
                chain_size: chain,
                family: parse_family(&family)?,
                crisp_pct: crisp,
                seed,
                divisor,
                ..Default::default()
            };
            if chain < 2 {
                return Err(CliError::Usage("chain must have at least 2 degrees".into()));
            }
            let onto = bench::gen_ontology(&cfg);
            write_out(&output, &textio::print_ontology(&onto))?;
            Ok(0)
        }
        Cmd::GenNested {
            output,
            depth,
            chain,
            family,
        } => {
            if depth == 0 {
                return Err(CliError::Usage("--depth must be at least 1".into()));
            }
            if chain < 2 {
                return Err(CliError::Usage("chain must have at least 2 degrees".into()));
            }
            let chain = Chain::new(chain, parse_family(&family)?, None)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let onto = bench::gen_nested_family(depth, chain);
            write_out(&output, &textio::print_ontology(&onto))?;
            Ok(0)
        }
        Cmd::Stats {
            input,
            crispify: do_crispify,
            chain,
        } => {
            let mut onto = load_ontology(&input)?;
            if let Some(n) = chain {
                onto = re_chain(&onto, n).map_err(CliError::Semantic)?;
            }
            let total_names = onto.sig.concepts.len() + onto.sig.roles.len();
            let crisp_names = onto.crisp_concepts.iter().filter(|&&c| c).count()
                + onto.crisp_roles.iter().filter(|&&c| c).count();
            let crisp_pct = (crisp_names * 100).checked_div(total_names).unwrap_or(0) as u32;
            let rows = if do_crispify {
                bench::measure(&onto, crisp_pct, 0).map_err(|e| classify_crispify(&input, e))?
            } else {
                vec![bench::MeasureRow {
                    chain: onto.chain.size(),
                    normalized: false,
                    crisp_pct,
                    tbox_occurrences: model::occurrences(&onto.tbox) + model::occurrences(&onto.rbox),
                    abox_occurrences: model::occurrences(&onto.abox),
                    gen_seed: 0,
                }]
            };
            print!("{}", bench::csv_report(&rows));
            Ok(0)
        }
    }
}

/// Exact re-embedding of all degrees onto a chain of `n` elements.
fn re_chain(o: &FuzzyOntology, n: u32) -> Result<FuzzyOntology, String> {
    if n < 2 {
        return Err("chain must have at least 2 degrees".into());
    }
    if o.chain.family() == Family::Custom {
        return Err("cannot re-chain a custom operator table".into());
    }
    let m = o.chain.size();
    let map = |d: Degree| -> Result<Degree, String> {
        let scaled = d.0 as u64 * u64::from(n - 1);
        if !scaled.is_multiple_of(u64::from(m - 1)) {
            return Err(format!(
                "degree {} has no exact image on a chain of {n}",
                textio::fmt_degree(&o.chain, d)
            ));
        }
        Ok(Degree((scaled / u64::from(m - 1)) as u32))
    };
    let mut out = o.clone();
    out.chain = Chain::new(n, o.chain.family(), None).map_err(|e| e.to_string())?;
    for axioms in [&mut out.abox, &mut out.tbox, &mut out.rbox] {
        for ax in axioms.iter_mut() {
            match ax {
                model::Axiom::Concept(a) => {
                    a.degree = map(a.degree)?;
                    a.concept = re_chain_concept(&a.concept, &map)?;
                }
                model::Axiom::Role(a) => a.degree = map(a.degree)?,
                model::Axiom::Gci(g) => {
                    g.degree = map(g.degree)?;
                    g.lhs = re_chain_concept(&g.lhs, &map)?;
                    g.rhs = re_chain_concept(&g.rhs, &map)?;
                }
                model::Axiom::Ria(r) => r.degree = map(r.degree)?,
                _ => {}
            }
        }
    }
    Ok(out)
}

fn re_chain_concept(
    c: &model::ConceptExpr,
    map: &impl Fn(Degree) -> Result<Degree, String>,
) -> Result<model::ConceptExpr, String> {
    use model::ConceptExpr as C;
    Ok(match c {
        C::Nominal(entries) => C::Nominal(
            entries
                .iter()
                .map(|(d, o)| Ok((map(*d)?, *o)))
                .collect::<Result<Vec<_>, String>>()?,
        ),
        C::Not(x) => C::not(re_chain_concept(x, map)?),
        C::And(a, b) => C::and(re_chain_concept(a, map)?, re_chain_concept(b, map)?),
        C::Or(a, b) => C::or(re_chain_concept(a, map)?, re_chain_concept(b, map)?),
        C::Exists(r, x) => C::exists(r.clone(), re_chain_concept(x, map)?),
        C::Forall(r, x) => C::forall(r.clone(), re_chain_concept(x, map)?),
        C::AtLeastQ(m, r, x) => C::AtLeastQ(*m, r.clone(), Box::new(re_chain_concept(x, map)?)),
        C::AtMostQ(m, r, x) => C::AtMostQ(*m, r.clone(), Box::new(re_chain_concept(x, map)?)),
        other => other.clone(),
    })
}

/// Entry point shared by the binary and the CLI tests.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cmd(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}
