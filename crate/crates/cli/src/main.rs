use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qcrystal::corpus::{default_corpus, parse_corpus, run_corpus};
use qcrystal::crystal::export::{to_dot, to_json};
use qcrystal::crystal::{generate, AbstractCrystal, RootOperators};
use qcrystal::dual_perfect::{check_certificate, extract_graph, verify_dual_perfect, Verdict};
use qcrystal::duality::{check_duality, dual_basis, verify_perfect, DualSpace, PerfectVerdict};
use qcrystal::global::{expansion_check, solve_global};
use qcrystal::half::dims_json;
use qcrystal::io::{certificate_record, parse_space_file, space_from_file, write_space, LoadedSpace};
use qcrystal::matcher::match_bases;
use qcrystal::space::{global_basis_space, Basis};
use qcrystal::strings::{all_string_data, check_string_subspaces, GoodSequence};
use qcrystal::{CartanDatum, Error, Field, GradedModel, HWModule, HalfAlgebra, Rational, Scalar};

/// Exact crystals, global bases and dual perfect bases.
#[derive(Parser)]
#[command(name = "qcrystal", version)]
struct Cli {
    /// Print errors as a JSON object on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Datum file ({"A": [[...]], "s": [...]}) or one of sl2, a2, b2, imaginary.
    #[arg(long)]
    datum: String,
    /// Highest weight in fundamental coordinates, e.g. "[1,0]".
    #[arg(long, conflicts_with = "binf")]
    lambda: Option<String>,
    /// Use the negative half instead of a module.
    #[arg(long)]
    binf: bool,
    #[arg(long)]
    depth: usize,
}

#[derive(Args)]
struct SpaceArgs {
    /// Space file, as written by `global --export-space`.
    #[arg(long)]
    space: PathBuf,
    /// Name of a basis stored in the file.
    #[arg(long)]
    basis: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Graded dimensions of the negative half.
    Halfalg {
        #[arg(long)]
        datum: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        dims: bool,
        /// Also check the defining relations.
        #[arg(long)]
        check: bool,
    },
    /// Dimensions and integrability of a highest weight module.
    Module {
        #[arg(long)]
        datum: String,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        dims: bool,
        #[arg(long)]
        check_oint: bool,
    },
    /// Crystal graph as JSON or DOT.
    Crystal {
        #[command(flatten)]
        model: ModelArgs,
        /// Output file; `.dot` selects DOT, anything else JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Global basis vectors.
    Global {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        expansion_report: Option<PathBuf>,
        /// Write the space with the global basis named "global".
        #[arg(long)]
        export_space: Option<PathBuf>,
    },
    /// Dual perfect bases of a space file.
    Dpb {
        #[command(subcommand)]
        action: DpbAction,
    },
    /// String data of every basis element.
    Strings {
        #[command(flatten)]
        space: SpaceArgs,
        /// Good sequence: "1,2" for a repeated block, "3;1,2" with a prefix.
        #[arg(long)]
        seq: Option<String>,
        /// Also run the subspace checks, with this many random samples.
        #[arg(long)]
        check: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Matches two dual perfect bases of one space.
    Match {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, num_args = 1, required = true)]
        basis: Vec<String>,
        #[arg(long)]
        seq: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dual basis on the transposed space.
    Duality {
        #[command(flatten)]
        space: SpaceArgs,
        /// Compare both verdicts and all level and operator data.
        #[arg(long)]
        roundtrip: bool,
    },
    /// Runs the whole pipeline on a corpus of examples.
    Corpus {
        /// JSON list of examples; the built-in corpus when omitted.
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Multiply one global basis vector by q before checking.
        #[arg(long)]
        mutate: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DpbAction {
    /// Decides whether the basis is dual perfect.
    Verify {
        file: PathBuf,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The dual perfect graph.
    Graph {
        file: PathBuf,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidDatum(_)
            | Error::NotDominant(_)
            | Error::InvalidSpace(_)
            | Error::NotABasis(_)
            | Error::Invalid(_)
            | Error::BeyondDepth { .. } => Failure::Usage(e.to_string()),
            other => Failure::Math(other),
        }
    }
}

type Run = Result<bool, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn load_datum(s: &str) -> Result<CartanDatum, Failure> {
    match s {
        "sl2" => Ok(CartanDatum::sl2()),
        "a2" => Ok(CartanDatum::a2()),
        "b2" => Ok(CartanDatum::b2()),
        "imaginary" => Ok(CartanDatum::imaginary(0)?),
        path => Ok(CartanDatum::from_json(&read(Path::new(path))?)?),
    }
}

fn parse_labels(s: &str) -> Result<Vec<i64>, Failure> {
    serde_json::from_str(s).map_err(|e| usage(format!("--lambda {s:?}: {e}")))
}

fn with_model<T>(
    args: &ModelArgs,
    body: impl FnOnce(&dyn ModelRun) -> Result<T, Failure>,
) -> Result<T, Failure> {
    let datum = load_datum(&args.datum)?;
    match (&args.lambda, args.binf) {
        (Some(l), false) => body(&HWModule::build(datum, &parse_labels(l)?, args.depth)?),
        (None, true) => body(&HalfAlgebra::build(datum, args.depth)),
        _ => Err(usage("give exactly one of --lambda and --binf")),
    }
}

/// The model-driven subcommands, object safe over both model kinds.
trait ModelRun {
    fn crystal(&self) -> Result<AbstractCrystal, Failure>;
    fn global(&self, expansion: Option<&Path>, export: Option<&Path>) -> Run;
}

impl<M: GradedModel> ModelRun for M {
    fn crystal(&self) -> Result<AbstractCrystal, Failure> {
        Ok(generate(&RootOperators::new(self))?.crystal)
    }

    fn global(&self, expansion: Option<&Path>, export: Option<&Path>) -> Run {
        let k = RootOperators::new(self);
        let g = generate(&k)?;
        let gb = solve_global(&k, &g)?;
        let nodes: Vec<Value> = (0..g.node_count())
            .map(|b| {
                json!({
                    "id": b,
                    "content": g.contents[b],
                    "vector": gb.vectors[b].iter().map(ToString::to_string).collect::<Vec<_>>(),
                })
            })
            .collect();
        let mut ok = true;
        if let Some(p) = expansion {
            let reports: Vec<_> = (0..self.datum().rank()).map(|i| expansion_check(self, &g, &gb, i)).collect();
            ok = reports.iter().all(|r| r.passed());
            emit(Some(p), &pretty(&reports))?;
        }
        if let Some(p) = export {
            let (space, basis, _) = global_basis_space(self, &g, &gb)?;
            emit(Some(p), &write_space(&space, &[("global", &basis)]))?;
        }
        emit(None, &pretty(&json!({ "degree_bound": gb.degree_bound, "nodes": nodes })))?;
        Ok(ok)
    }
}

fn pick<F: Field>(loaded: &LoadedSpace<F>, name: Option<&str>) -> Result<Basis<F>, Failure> {
    match name {
        Some(n) => loaded.1.get(n).cloned().ok_or_else(|| usage(format!("no basis named {n:?}"))),
        None if loaded.1.len() == 1 => Ok(loaded.1.values().next().expect("one").clone()),
        None if loaded.1.is_empty() => Ok(Basis::standard(&loaded.0)),
        None => Err(usage("the file has several bases; pick one with --basis")),
    }
}

/// Dispatches on the field named in a space file.
fn on_space<T>(path: &Path, run: impl SpaceRun<T>) -> Result<T, Failure> {
    let file = parse_space_file(&read(path)?)?;
    match file.field.as_str() {
        "Q" => run.call(space_from_file::<Rational>(&file)?),
        "Q(q)" => run.call(space_from_file::<Scalar>(&file)?),
        other => Err(usage(format!("unknown field {other:?}"))),
    }
}

trait SpaceRun<T> {
    fn call<F: Field>(self, loaded: LoadedSpace<F>) -> Result<T, Failure>;
}

struct Verify<'a> {
    basis: Option<&'a str>,
    out: Option<&'a Path>,
}

impl SpaceRun<bool> for Verify<'_> {
    fn call<F: Field>(self, loaded: LoadedSpace<F>) -> Run {
        let basis = pick(&loaded, self.basis)?;
        let (ok, v) = match verify_dual_perfect(&loaded.0, &basis)? {
            Verdict::Certified(c) => {
                let recheck = check_certificate(&loaded.0, &basis, &c);
                (
                    recheck.is_empty(),
                    json!({ "verdict": "certified", "certificate": certificate_record(&c), "recheck": recheck }),
                )
            }
            Verdict::Refuted(r) => (
                false,
                json!({ "verdict": "refuted", "color": r.color() + 1, "reason": r.to_string() }),
            ),
        };
        emit(self.out, &pretty(&v))?;
        Ok(ok)
    }
}

struct Graph<'a> {
    basis: Option<&'a str>,
    out: Option<&'a Path>,
}

impl SpaceRun<bool> for Graph<'_> {
    fn call<F: Field>(self, loaded: LoadedSpace<F>) -> Run {
        let basis = pick(&loaded, self.basis)?;
        match verify_dual_perfect(&loaded.0, &basis)? {
            Verdict::Certified(c) => {
                write_crystal(&extract_graph(&loaded.0, &basis, &c), self.out)?;
                Ok(true)
            }
            Verdict::Refuted(r) => Err(Failure::Math(Error::NotDualPerfect(r.to_string()))),
        }
    }
}

fn write_crystal(c: &AbstractCrystal, out: Option<&Path>) -> Result<(), Failure> {
    let dot = out.is_some_and(|p| p.extension().is_some_and(|e| e == "dot"));
    emit(out, if dot { to_dot(c) } else { to_json(c) }.trim_end())
}

fn certified<F: Field>(
    loaded: &LoadedSpace<F>,
    basis: &Basis<F>,
) -> Result<qcrystal::dual_perfect::Certificate<F>, Failure> {
    match verify_dual_perfect(&loaded.0, basis)? {
        Verdict::Certified(c) => Ok(c),
        Verdict::Refuted(r) => Err(Failure::Math(Error::NotDualPerfect(r.to_string()))),
    }
}

fn sequence(seq: Option<&str>, rank: usize) -> Result<GoodSequence, Failure> {
    Ok(match seq {
        Some(s) => GoodSequence::parse(s, rank)?,
        None => GoodSequence::cyclic(rank),
    })
}

struct Strings<'a> {
    basis: Option<&'a str>,
    seq: Option<&'a str>,
    check: Option<usize>,
    seed: u64,
}

impl SpaceRun<bool> for Strings<'_> {
    fn call<F: Field>(self, loaded: LoadedSpace<F>) -> Run {
        let basis = pick(&loaded, self.basis)?;
        let cert = certified(&loaded, &basis)?;
        let seq = sequence(self.seq, loaded.0.rank())?;
        let data = all_string_data(&seq, &cert, basis.len())?;
        let elements: Vec<Value> = data
            .iter()
            .enumerate()
            .map(|(b, (l, end))| json!({ "element": b, "datum": l.values(), "end": end }))
            .collect();
        let mut out = json!({ "elements": elements });
        let mut ok = true;
        if let Some(samples) = self.check {
            let report = check_string_subspaces(&loaded.0, &basis, &cert, &seq, samples, self.seed)?;
            ok = report.passed();
            out["checks"] = serde_json::to_value(&report).expect("serializable");
        }
        emit(None, &pretty(&out))?;
        Ok(ok)
    }
}

struct Match<'a> {
    bases: &'a [String],
    seq: Option<&'a str>,
    out: Option<&'a Path>,
}

impl SpaceRun<bool> for Match<'_> {
    fn call<F: Field>(self, loaded: LoadedSpace<F>) -> Run {
        let [a, b] = self.bases else {
            return Err(usage("give --basis twice"));
        };
        let b1 = pick(&loaded, Some(a))?;
        let b2 = pick(&loaded, Some(b))?;
        let c1 = certified(&loaded, &b1)?;
        let c2 = certified(&loaded, &b2)?;
        let seq = sequence(self.seq, loaded.0.rank())?;
        let m = match_bases(&loaded.0, &b1, &c1, &b2, &c2, &seq)?;
        emit(self.out, &pretty(&m))?;
        Ok(m.checks.passed())
    }
}

struct Dual<'a> {
    basis: Option<&'a str>,
    roundtrip: bool,
}

impl SpaceRun<bool> for Dual<'_> {
    fn call<F: Field>(self, loaded: LoadedSpace<F>) -> Run {
        let basis = pick(&loaded, self.basis)?;
        if self.roundtrip {
            let report = check_duality(&loaded.0, &basis)?;
            emit(None, &pretty(&report))?;
            return Ok(report.passed());
        }
        let dual = DualSpace::transpose(&loaded.0);
        let db = dual_basis(&dual, &basis);
        let (ok, v) = match verify_perfect(&dual, &db)? {
            PerfectVerdict::Certified(c) => {
                let colors: Vec<Value> = c
                    .colors
                    .iter()
                    .enumerate()
                    .map(|(i, p)| json!({ "color": i + 1, "delta": p.delta, "e": p.e, "f": p.f }))
                    .collect();
                (true, json!({ "verdict": "certified", "colors": colors }))
            }
            PerfectVerdict::Refuted(r) => (
                false,
                json!({ "verdict": "refuted", "color": r.color() + 1, "reason": r.to_string() }),
            ),
        };
        emit(None, &pretty(&v))?;
        Ok(ok)
    }
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Halfalg { datum, depth, dims: _, check } => {
            let h = HalfAlgebra::build(load_datum(&datum)?, depth);
            let mut out = json!({ "dims": dims_json(&h) });
            let mut ok = true;
            if check {
                let bad = h.check_defining_relations();
                ok = bad.is_empty();
                out["relations"] = json!(bad);
            }
            emit(None, &pretty(&out))?;
            Ok(ok)
        }
        Command::Module { datum, lambda, depth, dims: _, check_oint } => {
            let m = HWModule::build(load_datum(&datum)?, &parse_labels(&lambda)?, depth)?;
            let dims: Vec<Value> = m
                .dims()
                .iter()
                .map(|e| json!({ "content": e.content, "weight": e.weight, "dim": e.dim }))
                .collect();
            let mut out = json!({ "total": m.total_dim(), "dims": dims });
            let mut ok = true;
            if check_oint {
                let r = m.check_oint();
                ok = r.passed();
                out["oint"] = serde_json::to_value(&r).expect("serializable");
            }
            emit(None, &pretty(&out))?;
            Ok(ok)
        }
        Command::Crystal { model, out } => {
            let c = with_model(&model, |m| m.crystal())?;
            write_crystal(&c, out.as_deref())?;
            Ok(true)
        }
        Command::Global { model, expansion_report, export_space } => {
            with_model(&model, |m| m.global(expansion_report.as_deref(), export_space.as_deref()))
        }
        Command::Dpb { action } => match action {
            DpbAction::Verify { file, basis, out } => on_space(
                &file,
                Verify {
                    basis: basis.as_deref(),
                    out: out.as_deref(),
                },
            ),
            DpbAction::Graph { file, basis, out } => on_space(
                &file,
                Graph {
                    basis: basis.as_deref(),
                    out: out.as_deref(),
                },
            ),
        },
        Command::Strings { space, seq, check, seed } => on_space(
            &space.space,
            Strings {
                basis: space.basis.as_deref(),
                seq: seq.as_deref(),
                check,
                seed,
            },
        ),
        Command::Match { space, basis, seq, out } => on_space(
            &space,
            Match {
                bases: &basis,
                seq: seq.as_deref(),
                out: out.as_deref(),
            },
        ),
        Command::Duality { space, roundtrip } => on_space(
            &space.space,
            Dual {
                basis: space.basis.as_deref(),
                roundtrip,
            },
        ),
        Command::Corpus { file, seed, mutate, out } => {
            let specs = match file {
                Some(p) => parse_corpus(&read(&p)?)?,
                None => default_corpus(),
            };
            let report = run_corpus(&specs, seed, mutate)?;
            emit(out.as_deref(), &pretty(&report))?;
            for e in &report.examples {
                let bad = e.report.failures();
                eprintln!("{:<20} {}", e.name, if bad.is_empty() { "pass".to_string() } else { format!("FAIL ({})", bad.len()) });
            }
            Ok(report.passed)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("QCRYSTAL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| usage(format!("QCRYSTAL_THREADS={v:?} is not a number")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(e.to_string()))
}

fn report_error(json_errors: bool, kind: &str, msg: &str) {
    if json_errors {
        eprintln!("{}", json!({ "error": { "kind": kind, "message": msg } }));
    } else {
        eprintln!("error: {msg}");
    }
}

fn main() -> ExitCode {
    let json_errors = std::env::args().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            if json_errors {
                report_error(true, "usage", e.to_string().trim());
            } else {
                let _ = e.print();
            }
            return ExitCode::from(2);
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            report_error(json_errors, "usage", &m);
            ExitCode::from(2)
        }
        Err(Failure::Math(e)) => {
            let kind = match e {
                Error::HypothesisFailed(_) => "hypothesis_failed",
                Error::NotMonomial { .. } => "not_monomial",
                Error::NotDualPerfect(_) => "not_dual_perfect",
                Error::NoConvergence(_) => "no_convergence",
                _ => "violation",
            };
            report_error(json_errors, kind, &e.to_string());
            ExitCode::from(1)
        }
    }
}
