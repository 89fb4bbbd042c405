//! `otbounds`: batch front end over the analysis library.
//!
//! Every command prints one report holding the command line, the seed, the
//! crate version, the results and the wall time. Exit codes: 0 ok, 2 parse
//! error, 3 domain error, 4 table budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use otbounds::bounds::{
    check_reduction, eq_bound, general_h_bound, general_hmin_bound, general_i_bound, ip_bound, malicious_bounds,
    minentropy_feasibility, minimal_error, olfe_bound, quantum_commit_bits, quantum_commit_count,
    quantum_commitment_error, quantum_extension_min_error, quantum_ot_count, quantum_randomness_bounds,
    rate_bound_main2, thm_impossibility_bounds, BoundReport, OutputTerm, ReductionParams, ResourceDesc, Verdict,
};
use otbounds::dist::{log2, parse_prob, to_f64, LoadedTable, TableFile};
use otbounds::entropy::{
    max_entropy_cond, min_entropy_cond, mutual_info, shannon_cond, smooth_max_entropy, smooth_min_entropy,
};
use otbounds::primitives::{check_condition_1, derandomize_ot, parse_primitive, PrimitiveKind, PrimitiveSpec};
use otbounds::protocol::{
    and_share_from_2ot, eq_amplify, eq_from_ot, ip_from_ot, render, reverse_ot_demo, run_sampled, verify_security,
    ProtocolProgram, Value as Digits,
};
use otbounds::quantum::{
    run_sessions, sampling_check, security_bound_eval, Basis, Engine, SessionConfig, Strategy, StringFamily,
};
use otbounds::structure::{common_part, sufficient_stat};
use otbounds::{Error, JointDist, Prob, Result, SubDist};

#[derive(Parser)]
#[command(name = "otbounds", version, about = "Entropy bounds and protocol checks for oblivious transfer")]
struct Cli {
    /// Output syntax.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for every random choice. Trial `i` uses ChaCha8 stream `i`.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// JSON, the syntax of table files.
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Entropies and structure of a primitive or table file.
    Entropy(EntropyArgs),
    /// Checks M instances of OT(1,N,K) against a resource.
    CheckReduction(CheckArgs),
    /// Runs a two-party protocol exactly or by sampling.
    Simulate(SimulateArgs),
    /// Runs OT sessions over EPR pairs.
    Bb84(Bb84Args),
    /// Checks the cut-and-choose sampling estimate.
    SampleLemma(SampleArgs),
    /// Evaluates a closed-form bound.
    Bound(BoundArgs),
}

#[derive(Args)]
struct EntropyArgs {
    /// Primitive such as `ot:1,2,1,1` or `rabin:1/2,3`, or a table file.
    source: String,
    #[arg(long)]
    all: bool,
    /// H(U|V).
    #[arg(long)]
    shannon: bool,
    /// H_min(U|V).
    #[arg(long)]
    min: bool,
    /// H_max(U|V).
    #[arg(long)]
    max: bool,
    #[arg(long)]
    smooth_min: bool,
    #[arg(long)]
    smooth_max: bool,
    /// H(V|U) and I(U;V).
    #[arg(long)]
    mutual: bool,
    /// Common part and I(U;V|C).
    #[arg(long)]
    common: bool,
    /// Sufficient statistic of U with respect to V.
    #[arg(long)]
    sufficient: bool,
    /// Smoothing parameter, e.g. `1/10` or `0.1`.
    #[arg(long, default_value = "0")]
    eps: String,
    /// Accept table files whose mass sums to less than one.
    #[arg(long)]
    subnormalized: bool,
    /// Write the table to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// `ot:1,N,K,M`.
    #[arg(long)]
    target: String,
    /// `ot:1,n,k,m`, any randomness primitive, or a table file.
    #[arg(long)]
    resource: String,
    #[arg(long, default_value = "0")]
    eps: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolName {
    DerandomizedOt,
    And,
    Eq,
    Ip,
    EqAmplify,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Args)]
struct SimulateArgs {
    protocol: ProtocolName,
    /// Number of strings (derandomized OT) or string length (IP, amplified EQ).
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// String length (derandomized OT, EQ) or repetitions (amplified EQ).
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Trials per input pair in sampled mode.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Alice's input as a digit string; with `--y`, samples only this pair.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    Honest,
    FixedBasis,
    NoMeasure,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisName {
    Computational,
    Hadamard,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineName {
    Classical,
    DensityMatrix,
}

#[derive(Args)]
struct Bb84Args {
    /// EPR pairs.
    #[arg(long, default_value_t = 256)]
    m: usize,
    /// Commitment blocks.
    #[arg(long, default_value_t = 16)]
    kappa: usize,
    /// Fraction of blocks opened.
    #[arg(long, default_value = "1/4")]
    alpha: String,
    /// Output string length.
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, value_enum, default_value_t = StrategyName::Honest)]
    strategy: StrategyName,
    /// Basis used by the fixed-basis strategy.
    #[arg(long, value_enum, default_value_t = BasisName::Computational)]
    basis: BasisName,
    #[arg(long, value_enum, default_value_t = EngineName::Classical)]
    engine: EngineName,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// `eps` of the security bound.
    #[arg(long, default_value = "1/10")]
    eps: String,
    /// `delta` of the security bound.
    #[arg(long, default_value = "1/10")]
    delta: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Adversarial,
    AllZeros,
    AllOnes,
    HalfDense,
    BlockConcentrated,
    Random,
}

#[derive(Args)]
struct SampleArgs {
    /// Bits per block.
    #[arg(long, default_value_t = 8)]
    b: usize,
    #[arg(long, default_value_t = 32)]
    kappa: usize,
    #[arg(long, default_value = "1/4")]
    alpha: String,
    #[arg(long, default_value = "1/10")]
    delta: String,
    #[arg(long, default_value_t = 10000)]
    trials: u64,
    /// String family; `adversarial` runs the four adversarial ones.
    #[arg(long, value_enum, default_value_t = FamilyName::Adversarial)]
    family: FamilyName,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundName {
    /// Smallest error with kappa commitments.
    Imposs1,
    /// H(U|V), H(V|U), I(U;V|C) needed for m instances of OT(1,n,k).
    Thm,
    /// Rate and min-entropy bounds for OT(1,N,K)^M from OT(1,n,k)^m.
    Reduction,
    Eq,
    Ip,
    Olfe,
    GeneralH,
    GeneralI,
    GeneralHmin,
    Malicious,
    QuantumCommitBits,
    QuantumCommitCount,
    QuantumRandomness,
    QuantumOtCount,
    QuantumExtension,
    Security,
    ReverseOt,
}

#[derive(Clone, Copy, ValueEnum)]
enum TermName {
    Image,
    Alphabet,
}

#[derive(Args)]
struct BoundArgs {
    name: BoundName,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    kappa: Option<usize>,
    #[arg(long)]
    big_n: Option<usize>,
    #[arg(long)]
    big_k: Option<usize>,
    #[arg(long)]
    big_m: Option<usize>,
    /// Session blocks for `reverse-ot`.
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long, default_value = "0")]
    eps: String,
    #[arg(long, default_value = "0")]
    eps_prime: String,
    #[arg(long, default_value = "1/4")]
    alpha: String,
    #[arg(long, default_value = "1/10")]
    delta: String,
    /// Function primitive, e.g. `eq:3`.
    #[arg(long)]
    function: Option<String>,
    /// Randomness primitive or table file.
    #[arg(long)]
    resource: Option<String>,
    #[arg(long, value_enum, default_value_t = TermName::Image)]
    term: TermName,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let start = Instant::now();
    let results = match run(&cli.command, cli.seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let wall = start.elapsed().as_secs_f64();
    print!("{}", format_report(cli.format, &command, cli.seed, results, wall));
    ExitCode::SUCCESS
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::AlphabetOverflow { .. } => 4,
        _ => 3,
    }
}

fn format_report(format: Format, command: &str, seed: u64, results: Value, wall: f64) -> String {
    match format {
        Format::Structured => {
            let report = json!({
                "command": command,
                "version": env!("CARGO_PKG_VERSION"),
                "seed": seed,
                "results": results,
                "wall_time_s": wall,
            });
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
        }
        Format::Text => {
            let mut out = format!("command: {command}\nversion: {}\nseed: {seed}\nresults:\n", env!("CARGO_PKG_VERSION"));
            render_text(&results, 2, &mut out);
            out += &format!("wall_time_s: {wall:.3}\n");
            out
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match scalar(val) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(val, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(item, indent + 2, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

fn run(cmd: &Command, seed: u64) -> Result<Value> {
    match cmd {
        Command::Entropy(a) => cmd_entropy(a),
        Command::CheckReduction(a) => cmd_check_reduction(a),
        Command::Simulate(a) => cmd_simulate(a, seed),
        Command::Bb84(a) => cmd_bb84(a, seed),
        Command::SampleLemma(a) => cmd_sample_lemma(a, seed),
        Command::Bound(a) => cmd_bound(a, seed),
    }
}

/// Parses `3/8`, `2` or `0.125` exactly.
fn parse_number(s: &str) -> Result<Prob> {
    let s = s.trim();
    match s.split_once('.') {
        Some((int, frac)) if !s.contains('/') => {
            let digits = format!("{int}{frac}");
            let (neg, digits) = match digits.strip_prefix('-') {
                Some(d) => (true, d.to_string()),
                None => (false, digits),
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("not a number: {s:?}")));
            }
            let text = format!("{}{}/1{}", if neg { "-" } else { "" }, digits, "0".repeat(frac.len()));
            parse_prob(&text)
        }
        _ => parse_prob(s),
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    Ok(to_f64(&parse_number(s)?))
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Parse(format!("missing {flag}")))
}

enum Source {
    Joint(String, JointDist),
    Sub(SubDist),
    Function(PrimitiveSpec),
}

/// A primitive reference, or a table file when `s` names an existing file.
fn load_source(s: &str, allow_sub: bool) -> Result<Source> {
    let path = Path::new(s);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        return Ok(match TableFile::from_json(&text)?.load(allow_sub)? {
            LoadedTable::Normalized(j) => Source::Joint(s.to_string(), j),
            LoadedTable::Subnormalized(d) => Source::Sub(d),
        });
    }
    let spec = parse_primitive(s)?;
    Ok(match spec.kind {
        PrimitiveKind::Randomness(j) => Source::Joint(spec.name, j),
        PrimitiveKind::Function(_) => Source::Function(spec),
    })
}

fn load_resource(s: &str) -> Result<PrimitiveSpec> {
    match load_source(s, false)? {
        Source::Joint(name, j) => Ok(PrimitiveSpec { name, kind: PrimitiveKind::Randomness(j) }),
        _ => Err(Error::Domain(format!("{s} is not a randomness table"))),
    }
}

fn load_function(s: &str) -> Result<PrimitiveSpec> {
    match load_source(s, false)? {
        Source::Function(f) => Ok(f),
        _ => Err(Error::NotAFunction(s.to_string())),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
}

fn cmd_entropy(a: &EntropyArgs) -> Result<Value> {
    let eps = parse_number(&a.eps)?;
    let source = load_source(&a.source, a.subnormalized)?;
    let any = a.shannon || a.min || a.max || a.smooth_min || a.smooth_max || a.mutual || a.common || a.sufficient;
    let all = a.all || !any;
    let mut r = Map::new();
    match &source {
        Source::Joint(name, j) => {
            r.insert("source".into(), json!(name));
            r.insert("u_size".into(), json!(j.x_alphabet().len()));
            r.insert("v_size".into(), json!(j.y_alphabet().len()));
            r.insert("atoms".into(), json!(j.len()));
            if all || a.shannon {
                r.insert("H(U|V)".into(), json!(shannon_cond(j)));
            }
            if all || a.mutual {
                r.insert("H(V|U)".into(), json!(shannon_cond(&j.swap())));
                r.insert("I(U;V)".into(), json!(mutual_info(j)));
            }
            if all || a.common {
                let cp = common_part(j)?;
                let i = otbounds::bounds::common_part_information(j)?;
                r.insert("I(U;V|C)".into(), json!(i));
                r.insert("H(C)".into(), json!(cp.dist.entropy()));
                r.insert("common_classes".into(), json!(cp.x_partition.class_count()));
            }
            if all || a.sufficient {
                r.insert("sufficient_classes".into(), json!(sufficient_stat(j)?.class_count()));
            }
            if all || a.min {
                r.insert("H_min(U|V)".into(), json!(min_entropy_cond(j)));
            }
            if all || a.max {
                r.insert("H_max(U|V)".into(), json!(max_entropy_cond(j)));
            }
            if all || a.smooth_min {
                let s = smooth_min_entropy(j, &eps)?;
                r.insert(
                    "H_min^eps(U|V)".into(),
                    json!({"eps": s.epsilon.to_string(), "value": s.value, "guessing_probability": s.objective.to_string()}),
                );
            }
            if all || a.smooth_max {
                let s = smooth_max_entropy(j, &eps)?;
                r.insert(
                    "H_max^eps(U|V)".into(),
                    json!({"eps": s.epsilon.to_string(), "value": s.value, "support": s.objective.to_string()}),
                );
            }
            if let Some(path) = &a.dump {
                write_file(path, &(j.to_file().to_json() + "\n"))?;
                r.insert("dumped".into(), json!(path.display().to_string()));
            }
        }
        Source::Sub(d) => {
            let g = d.guessing_probability();
            r.insert("total_mass".into(), json!(d.total().to_string()));
            r.insert("guessing_probability".into(), json!(g.to_string()));
            r.insert("H_min(U|V)".into(), json!(if g == Prob::from_integer(0.into()) { None } else { Some(-log2(&g)) }));
            r.insert("max_column_support".into(), json!(d.max_column_support()));
            r.insert("H_max(U|V)".into(), json!((d.max_column_support().max(1) as f64).log2()));
            if let Some(path) = &a.dump {
                write_file(path, &(d.to_file().to_json() + "\n"))?;
                r.insert("dumped".into(), json!(path.display().to_string()));
            }
        }
        Source::Function(spec) => {
            if a.dump.is_some() {
                return Err(Error::Unsupported(format!("{} is a function, not a table", spec.name)));
            }
            let t = spec.function()?;
            let (best, y) = t.max_shannon_given_output();
            r.insert("function".into(), json!(spec.name));
            r.insert("x_size".into(), json!(t.x.len()));
            r.insert("y_size".into(), json!(t.y.len()));
            r.insert("z_size".into(), json!(t.z.len()));
            r.insert("d_f".into(), json!(t.d_f()));
            r.insert("max_y H(X|f(X,y))".into(), json!({"value": best, "y": t.y.symbol(y).as_str()}));
            r.insert("distinct_rows".into(), json!(check_condition_1(spec)?));
            if all || a.smooth_min || a.min {
                let (s, y) = t.max_smooth_min_given_output(&eps)?;
                r.insert(
                    "max_y H_min^eps(X|f(X,y))".into(),
                    json!({"eps": s.epsilon.to_string(), "value": s.value, "y": t.y.symbol(y).as_str()}),
                );
            }
        }
    }
    Ok(Value::Object(r))
}

/// `ot:1,n,k,m` as `(n, k, m)`.
fn parse_ot(s: &str) -> Result<Option<(usize, usize, usize)>> {
    let Some(args) = s.strip_prefix("ot:") else { return Ok(None) };
    let v: Vec<usize> = args
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| Error::Parse(format!("bad OT parameters {s:?}"))))
        .collect::<Result<_>>()?;
    if v.len() != 4 {
        return Err(Error::Parse(format!("expected ot:t,n,k,m, got {s:?}")));
    }
    if v[0] != 1 {
        return Err(Error::Unsupported(format!("only t = 1 is supported, got {s:?}")));
    }
    Ok(Some((v[1], v[2], v[3])))
}

fn reports_json(reports: &[BoundReport]) -> Value {
    serde_json::to_value(reports).expect("reports serialize")
}

fn overall(reports: &[BoundReport]) -> &'static str {
    if reports.iter().any(|r| r.verdict == Verdict::Violated) {
        "violated"
    } else if reports.iter().all(|r| r.verdict == Verdict::Vacuous) {
        "vacuous"
    } else {
        "satisfiable"
    }
}

fn cmd_check_reduction(a: &CheckArgs) -> Result<Value> {
    let (big_n, big_k, big_m) =
        parse_ot(&a.target)?.ok_or_else(|| Error::Parse(format!("target must be ot:1,N,K,M, got {:?}", a.target)))?;
    let eps = parse_f64(&a.eps)?;
    let report = match parse_ot(&a.resource)? {
        Some((n, k, m)) => check_reduction(big_n, big_k, big_m, &ResourceDesc::Ot { n, k, m }, eps)?,
        None => {
            let spec = load_resource(&a.resource)?;
            check_reduction(big_n, big_k, big_m, &ResourceDesc::Table(&spec), eps)?
        }
    };
    Ok(json!({
        "target": a.target,
        "resource": a.resource,
        "eps": eps,
        "bounds": reports_json(&report.reports),
        "minimal_error": report.minimal_error,
        "minimal_error_f64": report.minimal_error_f64,
        "required_ratio": report.required_ratio,
        "verdict": overall(&report.reports),
    }))
}

fn build_protocol(a: &SimulateArgs) -> Result<ProtocolProgram> {
    match a.protocol {
        ProtocolName::DerandomizedOt => derandomize_ot(a.n, a.k),
        ProtocolName::And => Ok(and_share_from_2ot()),
        ProtocolName::Eq => eq_from_ot(a.k),
        ProtocolName::Ip => ip_from_ot(a.n),
        ProtocolName::EqAmplify => eq_amplify(a.n, a.k),
    }
}

fn parse_digits(s: &str) -> Result<Digits> {
    s.chars()
        .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parse(format!("not a digit string: {s:?}"))))
        .collect()
}

fn cmd_simulate(a: &SimulateArgs, seed: u64) -> Result<Value> {
    let p = build_protocol(a)?;
    match a.mode {
        Mode::Exact => {
            let r = verify_security(&p, &p.simulators)?;
            Ok(json!({
                "protocol": r.protocol,
                "mode": "exact",
                "input_pairs": r.input_pairs,
                "correctness_error": r.correctness_error.to_string(),
                "alice_distance": r.alice_distance.to_string(),
                "bob_distance": r.bob_distance.to_string(),
                "perfect": r.is_perfect(),
                "ot_calls": r.ot_calls,
                "rounds": r.rounds,
            }))
        }
        Mode::Sampled => {
            let pairs: Vec<(Digits, Digits)> = match (&a.x, &a.y) {
                (Some(x), Some(y)) => vec![(parse_digits(x)?, parse_digits(y)?)],
                (None, None) => {
                    if p.x_domain.is_empty() || p.y_domain.is_empty() {
                        return Err(Error::InvalidParameter("input domain too large to enumerate; pass --x and --y".into()));
                    }
                    p.x_domain.iter().flat_map(|x| p.y_domain.iter().map(move |y| (x.clone(), y.clone()))).collect()
                }
                _ => return Err(Error::Parse("--x and --y go together".into())),
            };
            let mut rows = Vec::new();
            let mut total = 0;
            let mut errors = 0;
            let mut worst: f64 = 0.0;
            // Pair i draws its trials from seed + i.
            for (i, (x, y)) in pairs.iter().enumerate() {
                let run = run_sampled(&p, x, y, a.trials, seed.wrapping_add(i as u64))?;
                total += run.trials;
                errors += run.trials - run.correct;
                worst = worst.max(run.error_rate());
                let mut row = json!({
                    "x": render(x),
                    "y": render(y),
                    "trials": run.trials,
                    "errors": run.trials - run.correct,
                    "error_rate": run.error_rate(),
                });
                if pairs.len() == 1 {
                    row["outputs"] = json!(run.outputs);
                }
                rows.push(row);
            }
            Ok(json!({
                "protocol": p.name,
                "mode": "sampled",
                "trials": total,
                "errors": errors,
                "max_error_rate": worst,
                "ot_calls": p.calls("OT"),
                "rounds": p.rounds(),
                "pairs": rows,
            }))
        }
    }
}

fn cmd_bb84(a: &Bb84Args, seed: u64) -> Result<Value> {
    let alpha = parse_number(&a.alpha)?;
    let engine = match a.engine {
        EngineName::Classical => Engine::Classical,
        EngineName::DensityMatrix => Engine::DensityMatrix,
    };
    let strategy = match a.strategy {
        StrategyName::Honest => Strategy::Honest,
        StrategyName::FixedBasis => Strategy::FixedBasis(match a.basis {
            BasisName::Computational => Basis::Computational,
            BasisName::Hadamard => Basis::Hadamard,
        }),
        StrategyName::NoMeasure => Strategy::NoMeasureRandomCommit,
    };
    let cfg = SessionConfig { m: a.m, kappa: a.kappa, alpha: alpha.clone(), k: a.k, engine };
    let stats = run_sessions(&cfg, strategy, a.trials, seed)?;
    let bound = security_bound_eval(a.m, a.kappa, to_f64(&alpha), a.k, parse_f64(&a.eps)?, parse_f64(&a.delta)?)?;
    Ok(json!({
        "m": a.m,
        "kappa": a.kappa,
        "alpha": alpha.to_string(),
        "k": a.k,
        "strategy": a.strategy.to_possible_value().map(|v| v.get_name().to_string()),
        "trials": stats.trials,
        "aborts": stats.aborts,
        "pass_rate": stats.pass_rate(),
        "correct": stats.correct,
        "correctness_rate": stats.correctness_rate(),
        "guessed_both": stats.guessed_both,
        "advantage": stats.advantage(a.k),
        "security_bound": {
            "privacy_amplification": bound.privacy_amplification,
            "basis_mismatch": bound.basis_mismatch,
            "sampling": bound.sampling,
            "total": bound.total(),
            "vacuous": bound.is_vacuous(),
        },
    }))
}

fn cmd_sample_lemma(a: &SampleArgs, seed: u64) -> Result<Value> {
    let alpha = parse_f64(&a.alpha)?;
    let delta = parse_f64(&a.delta)?;
    let families: Vec<StringFamily> = match a.family {
        FamilyName::Adversarial => StringFamily::ADVERSARIAL.to_vec(),
        FamilyName::AllZeros => vec![StringFamily::AllZeros],
        FamilyName::AllOnes => vec![StringFamily::AllOnes],
        FamilyName::HalfDense => vec![StringFamily::HalfDense],
        FamilyName::BlockConcentrated => vec![StringFamily::BlockConcentrated],
        FamilyName::Random => vec![StringFamily::Random],
    };
    let mut rows = Vec::new();
    let mut bound = 0.0;
    for f in families {
        let r = sampling_check(a.b, a.kappa, alpha, delta, f, a.trials, seed)?;
        bound = r.bound;
        rows.push(json!({
            "family": f.name(),
            "trials": r.trials,
            "failures": r.failures,
            "rate": r.rate(),
            "within_bound": r.within_bound(),
        }));
    }
    Ok(json!({ "b": a.b, "kappa": a.kappa, "alpha": alpha, "delta": delta, "bound": bound, "families": rows }))
}

fn cmd_bound(a: &BoundArgs, seed: u64) -> Result<Value> {
    let eps_q = parse_number(&a.eps)?;
    let eps = to_f64(&eps_q);
    let resource = || load_resource(a.resource.as_deref().ok_or_else(|| Error::Parse("missing --resource".into()))?);
    let function = || load_function(a.function.as_deref().ok_or_else(|| Error::Parse("missing --function".into()))?);
    let one = |r: BoundReport| json!({ "bounds": reports_json(std::slice::from_ref(&r)), "verdict": overall(&[r]) });
    let many = |r: &[BoundReport]| json!({ "bounds": reports_json(r), "verdict": overall(r) });
    Ok(match a.name {
        BoundName::Imposs1 => {
            let kappa = need(a.kappa, "--kappa")?;
            let kappa = u32::try_from(kappa).map_err(|_| Error::Domain(format!("kappa = {kappa} is too large")))?;
            let e = quantum_commitment_error(kappa);
            json!({ "kappa": kappa, "min_error": e.to_string(), "min_error_f64": to_f64(&e) })
        }
        BoundName::Thm => many(&thm_impossibility_bounds(need(a.n, "--n")?, need(a.k, "--k")?, need(a.m, "--m")?, eps)?),
        BoundName::Reduction => {
            let p = ReductionParams {
                big_m: need(a.big_m, "--big-m")?,
                big_n: need(a.big_n, "--big-n")?,
                big_k: need(a.big_k, "--big-k")?,
                m: need(a.m, "--m")?,
                n: need(a.n, "--n")?,
                k: need(a.k, "--k")?,
                eps,
            };
            let reports = [rate_bound_main2(&p)?, minentropy_feasibility(&p)?];
            let me = minimal_error(&p)?;
            let mut v = many(&reports);
            v["minimal_error"] = json!(me.to_string());
            v["minimal_error_f64"] = json!(to_f64(&me));
            v
        }
        BoundName::Eq => one(eq_bound(need(a.k, "--k")?, eps)?),
        BoundName::Ip => one(ip_bound(need(a.n, "--n")?, eps)?),
        BoundName::Olfe => many(&olfe_bound(need(a.q, "--q")?, need(a.m, "--m")?, eps)?),
        BoundName::GeneralH => {
            let term = match a.term {
                TermName::Image => OutputTerm::Image,
                TermName::Alphabet => OutputTerm::Alphabet,
            };
            one(general_h_bound(&function()?, &resource()?, eps, term)?)
        }
        BoundName::GeneralI => one(general_i_bound(&function()?, &resource()?, eps)?),
        BoundName::GeneralHmin => {
            one(general_hmin_bound(&function()?, &resource()?, &eps_q, &parse_number(&a.eps_prime)?)?)
        }
        BoundName::Malicious => many(&malicious_bounds(&resource()?, need(a.k, "--k")?, &eps_q)?),
        BoundName::QuantumCommitBits => one(quantum_commit_bits(need(a.k, "--k")?, eps)?),
        BoundName::QuantumCommitCount => one(quantum_commit_count(eps)?),
        BoundName::QuantumRandomness => many(&quantum_randomness_bounds(&resource()?, need(a.k, "--k")?, eps)?),
        BoundName::QuantumOtCount => one(quantum_ot_count(need(a.n, "--n")?, need(a.k, "--k")?, eps)?),
        BoundName::QuantumExtension => {
            let m = need(a.m, "--m")?;
            let e = quantum_extension_min_error(m)?;
            json!({ "m": m, "min_error": e.as_ref().map(|e| e.to_string()), "min_error_f64": e.as_ref().map(to_f64) })
        }
        BoundName::Security => {
            let b = security_bound_eval(
                need(a.m, "--m")?,
                need(a.kappa, "--kappa")?,
                parse_f64(&a.alpha)?,
                need(a.k, "--k")?,
                eps,
                parse_f64(&a.delta)?,
            )?;
            json!({
                "privacy_amplification": b.privacy_amplification,
                "basis_mismatch": b.basis_mismatch,
                "sampling": b.sampling,
                "total": b.total(),
                "vacuous": b.is_vacuous(),
            })
        }
        BoundName::ReverseOt => {
            let session = SessionConfig {
                m: a.m.unwrap_or(65536),
                kappa: a.blocks.unwrap_or(256),
                alpha: parse_number(&a.alpha)?,
                k: a.k.unwrap_or(4096),
                engine: Engine::Classical,
            };
            let r = reverse_ot_demo(session.k, a.kappa.unwrap_or(16), &session, seed)?;
            json!({
                "k": r.k,
                "resource_ots": r.resource_ots,
                "resource_string_len": r.resource_string_len,
                "pairs": r.pairs,
                "resource_entropy": r.resource_entropy,
                "classical_requirement": r.classical_requirement,
                "violation_factor": r.violation_factor,
                "commitment_accepted": r.commitment_accepted,
                "honest_correct": r.honest_correct,
                "verdict": r.verdict,
            })
        }
    })
}
