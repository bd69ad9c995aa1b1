//! `fatou`: build and verify stages, compute ranks, run games and
//! convergence checks, export trees, and replay stored artifacts.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fatou_core::convergence::{
    down0_by_norm_check, scaled_reciprocal, sigma_order_witness_check, uniform_conv_check, uniform_regulator,
    x_down0_check, x_up_unbounded_check, ConvBudgets,
};
use fatou_core::lattice::dense_base;
use fatou_core::{
    build, play, stage_tree, verify, Budgets, Bundle, BundleFile, Check, Element, Error, FiniteTree, Ordinal,
    Rational, Report, SequenceSpec, SpaceDescriptor, StrategyI, StrategyII, Transcript, Verdict,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const ENVELOPE_SCHEMA: u32 = 1;

const ORDINAL_HELP: &str = "\
Ordinals are written in Cantor normal form shorthand: a sum of terms joined
by '+', where a term is a natural number or a power of omega with an optional
coefficient. Omega is 'w' or 'ω'; '^' takes a natural number, another power,
or a parenthesised ordinal; '*k' multiplies a power by k.

  3   w   w+1   w*2   w^2+w*3+1   w^w   w^(w+1)

Terms must be written in non-increasing order to mean what they say; the
parser applies ordinal addition, so 1+w reads as w.";

const EXIT_HELP: &str = "\
Exit codes: 0 every checked assertion passed, 1 an assertion failed (the
output carries the witness), 2 some verdict is Unknown within the budgets,
3 usage, parse or schema error.";

#[derive(Parser, Debug)]
#[command(name = "fatou", version, about = "Ordinal-indexed lattices, witness trees, games and convergence checks", after_long_help = format!("{ORDINAL_HELP}\n\n{EXIT_HELP}"))]
struct Cli {
    /// Seed for randomized choices (recorded in every output).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the JSON envelope instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Write the artifact to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the stage-α space and witness tree.
    Build {
        /// Stage ordinal, e.g. 1, w, w^2+1 (see --help).
        #[arg(long)]
        alpha: String,
    },
    /// Re-check a stored bundle within budgets.
    Verify {
        #[arg(long)]
        bundle: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Rank of a bundle's witness tree or of an explicit finite tree.
    Rank {
        /// Bundle file or finite tree JSON ({"nodes": [[...], ...]}).
        #[arg(long, conflicts_with = "alpha", required_unless_present = "alpha")]
        tree: Option<PathBuf>,
        /// Stage whose witness tree to rank.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Play G_α[(z_n)] between two deterministic strategies.
    Game(GameArgs),
    /// Convergence checks on rule-represented sequences.
    Conv {
        #[command(subcommand)]
        kind: ConvKind,
    },
    /// Export a witness tree truncation as DOT or JSON.
    Export {
        #[arg(long, conflicts_with = "alpha", required_unless_present = "alpha")]
        bundle: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        components: usize,
    },
    /// Re-run a stored artifact and compare the results exactly.
    Replay {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long, default_value_t = 32)]
    n_budget: usize,
    #[arg(long, default_value_t = 8)]
    components: usize,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, default_value_t = 8)]
    truncation: usize,
}

#[derive(Args, Debug)]
struct GameArgs {
    #[arg(long)]
    alpha: String,
    /// fatou | countdown[:WIDTH] | fixed:ORD,ORD,...
    #[arg(long, default_value = "countdown")]
    strategy_i: String,
    #[arg(long, value_enum, default_value_t = IIKind::Tree)]
    strategy_ii: IIKind,
    /// Sequence (z_n) as JSON; defaults to z_n of the stage-α space.
    #[arg(long)]
    z: Option<PathBuf>,
    /// JSON array of elements: the pool for greedy, the script for fixed.
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Greedy pool size when no pool file is given, drawn with --seed.
    #[arg(long, default_value_t = 32)]
    pool_size: usize,
    #[arg(long, default_value_t = 32)]
    n_budget: usize,
    /// Exit 1 unless this player wins.
    #[arg(long, value_parser = ["I", "II"])]
    expect: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IIKind {
    Tree,
    Greedy,
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Args, Debug)]
struct SeqArgs {
    /// Sequence JSON.
    #[arg(long)]
    seq: PathBuf,
    /// Basis/dominating indices and sequence indices searched.
    #[arg(long, default_value_t = 64)]
    budget: usize,
}

#[derive(Subcommand, Debug)]
enum ConvKind {
    /// Uniform convergence of x_n to x.
    Uniform {
        #[command(flatten)]
        s: SeqArgs,
        #[arg(long)]
        x: PathBuf,
        /// Comma-separated tolerances.
        #[arg(long, default_value = "1/10,1/100")]
        eps: String,
    },
    /// σ-order convergence of x_n to x, checked against a witness sequence;
    /// without one, the witness is derived from a uniform regulator.
    Sigma {
        #[command(flatten)]
        s: SeqArgs,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Decreasing, positive, infimum 0.
    Down0 {
        #[command(flatten)]
        s: SeqArgs,
        /// Decide through vanishing norms, asserting σ-order continuity.
        #[arg(long)]
        by_norm: bool,
    },
    /// Increasing, positive, order-unbounded.
    UpUnbounded {
        #[command(flatten)]
        s: SeqArgs,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct Envelope {
    schema: u32,
    command: Vec<String>,
    seed: u64,
    result: Value,
}

/// What a command produced, before any output is written.
struct Run {
    result: Value,
    text: String,
    code: u8,
    /// Raw text written by --out instead of the envelope.
    raw: Option<String>,
}

/// Errors surface as exit 3 unless they are budget exhaustion.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetOverflow(_) | Error::SearchExhausted(_) | Error::Uncertifiable { .. } => 2,
            _ => 3,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 3, msg: msg.into() }
}

fn ordinal(s: &str) -> Result<Ordinal, Failure> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    // artifacts written by this tool carry their payload under "result"
    Ok(match v {
        Value::Object(mut m) if m.contains_key("command") && m.contains_key("result") => m.remove("result").unwrap(),
        v => v,
    })
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_value(read_json(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("artifacts serialize")
}

fn report_run(mut report: Report, seed: u64) -> Run {
    report.seed = Some(seed);
    Run { text: report.to_string(), code: report.exit_code() as u8, result: to_value(&report), raw: None }
}

fn cmd_build(alpha: &str) -> Result<Run, Failure> {
    let alpha = ordinal(alpha)?;
    let bundle = build(&alpha)?;
    let file = bundle.to_file();
    let text = format!(
        "stage {}: space {}, rank certificate {}, {} stored witness strings",
        file.stage_text,
        file.space,
        file.rank_cert_text,
        file.samples.len()
    );
    Ok(Run { result: to_value(&file), text, code: 0, raw: None })
}

fn cmd_verify(path: &Path, b: &BudgetArgs, seed: u64) -> Result<Run, Failure> {
    let file: BundleFile = load(path)?;
    let bundle = Bundle::from_file(file)?;
    let budgets = Budgets { n_budget: b.n_budget, components: b.components, depth: b.depth, truncation: b.truncation };
    Ok(report_run(verify(&bundle, &budgets), seed))
}

fn cmd_rank(tree: Option<&Path>, alpha: Option<&str>) -> Result<Run, Failure> {
    let (rank, kind) = match (tree, alpha) {
        (_, Some(a)) => (stage_tree(&ordinal(a)?)?.structured_rank()?, "structured"),
        (Some(p), None) => {
            let v = read_json(p)?;
            if v.get("stage").is_some() {
                let file: BundleFile = serde_json::from_value(v).map_err(|e| usage(format!("{}: {e}", p.display())))?;
                (Bundle::from_file(file)?.witness.structured_rank()?, "structured")
            } else {
                let nodes: Vec<Vec<Value>> = serde_json::from_value(v.get("nodes").cloned().unwrap_or(Value::Null))
                    .map_err(|e| usage(format!("{}: expected a bundle or {{\"nodes\": [...]}}: {e}", p.display())))?;
                let strings = nodes.into_iter().map(|s| s.iter().map(Value::to_string).collect::<Vec<_>>());
                (FiniteTree::new(strings)?.finite_rank(), "finite")
            }
        }
        (None, None) => return Err(usage("rank needs --tree or --alpha")),
    };
    Ok(Run { result: json!({"rank": rank, "rank_text": rank.to_string(), "kind": kind}), text: rank.to_string(), code: 0, raw: None })
}

fn strategy_i(s: &str) -> Result<StrategyI, Failure> {
    let (head, arg) = s.split_once(':').map_or((s, None), |(h, a)| (h, Some(a)));
    match (head, arg) {
        ("fatou", None) => Ok(StrategyI::Fatou),
        ("countdown", None) => Ok(StrategyI::Countdown { width: 1 }),
        ("countdown", Some(w)) => {
            w.parse().map(|width| StrategyI::Countdown { width }).map_err(|_| usage(format!("bad countdown width {w:?}")))
        }
        ("fixed", Some(list)) => Ok(StrategyI::Fixed { moves: list.split(',').map(ordinal).collect::<Result<_, _>>()? }),
        _ => Err(usage(format!("unknown strategy for I: {s:?} (fatou | countdown[:W] | fixed:ORD,...)"))),
    }
}

fn greedy_pool(space: &SpaceDescriptor, size: usize, seed: u64) -> Result<Vec<Element>, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<Element> = dense_base().take(size.saturating_mul(8).max(1)).collect();
    candidates.shuffle(&mut rng);
    candidates
        .into_iter()
        .take(size)
        .map(|e| e.in_space(space).map_err(Failure::from))
        .collect()
}

fn cmd_game(g: &GameArgs, seed: u64) -> Result<Run, Failure> {
    let alpha = ordinal(&g.alpha)?;
    let s1 = strategy_i(&g.strategy_i)?;
    let z: SequenceSpec = match &g.z {
        Some(p) => load(p)?,
        None => SequenceSpec::z(&SpaceDescriptor::for_stage(&alpha)?),
    };
    let pool = g.pool.as_deref().map(load::<Vec<Element>>).transpose()?;
    let s2 = match g.strategy_ii {
        IIKind::Tree => StrategyII::Tree(stage_tree(&alpha)?),
        IIKind::Greedy => StrategyII::Greedy {
            pool: match pool {
                Some(p) => p,
                None => greedy_pool(z.space(), g.pool_size, seed)?,
            },
            n_budget: g.n_budget,
        },
        IIKind::Fixed => StrategyII::Fixed(pool.ok_or_else(|| usage("--strategy-ii fixed needs --pool"))?),
    };
    let t = play(&alpha, &z, &s1, &s2, g.n_budget)?;
    let mut code = match t.reason {
        fatou_core::game::Reason::Undecided => 2,
        _ => 0,
    };
    if let Some(want) = &g.expect {
        if t.winner.to_string() != *want {
            code = 1;
        }
    }
    Ok(Run { text: transcript_text(&t), result: to_value(&t), code, raw: None })
}

fn transcript_text(t: &Transcript) -> String {
    let mut s = format!("G_{} with {} vs {}, {} round(s)\n", t.alpha, t.strategy_i, t.strategy_ii, t.rounds);
    for (i, m) in t.moves.iter().enumerate() {
        let y = m.y.as_ref().map_or("-".to_string(), |y| format!("{} (φ = {})", y.digest(), y.phi()));
        s += &format!("  {}: I plays {}, II answers {y}\n", i + 1, m.beta);
    }
    if let Some(j) = t.verdict.as_ref().and_then(|v| v.refutation()) {
        s += &format!("  refuted: {:?}, lhs {}, rhs {}\n", j.inequality, j.lhs, j.rhs);
    }
    s + &format!("winner: {} ({:?})", t.winner, t.reason)
}

fn element_at(path: &Path, spec: &SequenceSpec) -> Result<Element, Failure> {
    let x: Element = load(path)?;
    if x.space() != spec.space() {
        return Err(usage(format!("{}: element lives in {}, sequence in {}", path.display(), x.space(), spec.space())));
    }
    Ok(x)
}

fn cmd_conv(kind: &ConvKind, seed: u64) -> Result<Run, Failure> {
    let report = match kind {
        ConvKind::Uniform { s, x, eps } => {
            let spec: SequenceSpec = load(&s.seq)?;
            let x = element_at(x, &spec)?;
            let eps: Vec<Rational> =
                eps.split(',').map(|e| e.trim().parse().map_err(|e: Error| usage(e.to_string()))).collect::<Result<_, _>>()?;
            uniform_conv_check(&spec, &x, &eps)
        }
        ConvKind::Sigma { s, x, witness } => {
            let spec: SequenceSpec = load(&s.seq)?;
            let x = element_at(x, &spec)?;
            let budgets = ConvBudgets { m: s.budget, n: s.budget };
            match witness {
                Some(w) => sigma_order_witness_check(&spec, &x, &load(w)?, &budgets),
                None => match uniform_regulator(&spec, &x) {
                    Some(u) => {
                        let mut r = sigma_order_witness_check(&spec, &x, &scaled_reciprocal(u.clone()), &budgets);
                        r.push(Check::new("regulator", Verdict::Pass, "witness u/m from the uniform regulator").with_evidence(to_value(&u)));
                        r
                    }
                    None => {
                        let mut r = Report::new("σ-order convergence", to_value(&budgets));
                        r.push(Check::new("witness", Verdict::Unknown, "no witness given and no uniform regulator found"));
                        r
                    }
                },
            }
        }
        ConvKind::Down0 { s, by_norm } => {
            let spec: SequenceSpec = load(&s.seq)?;
            if *by_norm {
                down0_by_norm_check(&spec, true)
            } else {
                x_down0_check(&spec, &ConvBudgets { m: s.budget, n: s.budget })
            }
        }
        ConvKind::UpUnbounded { s } => {
            let spec: SequenceSpec = load(&s.seq)?;
            x_up_unbounded_check(&spec, &ConvBudgets { m: s.budget, n: s.budget })
        }
    };
    Ok(report_run(report, seed))
}

fn cmd_export(bundle: Option<&Path>, alpha: Option<&str>, format: Format, depth: usize, components: usize) -> Result<Run, Failure> {
    let tree = match (bundle, alpha) {
        (_, Some(a)) => stage_tree(&ordinal(a)?)?,
        (Some(p), None) => Bundle::from_file(load(p)?)?.witness,
        (None, None) => return Err(usage("export needs --bundle or --alpha")),
    };
    Ok(match format {
        Format::Dot => {
            let dot = tree.to_dot(depth, components)?;
            Run { result: json!({"dot": dot}), text: dot.trim_end().to_string(), code: 0, raw: Some(dot) }
        }
        Format::Json => {
            let t = tree.truncate(depth, components)?;
            let text = format!("{} nodes up to depth {depth}, finite rank {}", t.len(), t.finite_rank());
            Run { result: to_value(&t), text, code: 0, raw: None }
        }
    })
}

fn cmd_replay(path: &Path) -> Result<Run, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if v.get("moves").is_some() {
        let t: Transcript = serde_json::from_value(v).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let again = fatou_core::game::replay(&t);
        let same = again == t;
        return Ok(Run {
            result: json!({"identical": same, "kind": "transcript"}),
            text: format!("transcript replay: {}", if same { "identical" } else { "differs" }),
            code: if same { 0 } else { 1 },
            raw: None,
        });
    }
    let env: Envelope = serde_json::from_value(v).map_err(|e| usage(format!("{}: not an artifact of this tool: {e}", path.display())))?;
    if env.schema != ENVELOPE_SCHEMA {
        return Err(usage(format!("{}: envelope schema {} (expected {ENVELOPE_SCHEMA})", path.display(), env.schema)));
    }
    let argv = std::iter::once("fatou".to_string()).chain(env.command.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| usage(format!("stored command does not parse: {e}")))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(usage("refusing to replay a replay"));
    }
    let again = run(&cli)?;
    let same = again.result == env.result;
    let mut result = json!({"identical": same, "command": env.command});
    if !same {
        result["expected"] = env.result;
        result["actual"] = again.result;
    }
    Ok(Run {
        result,
        text: format!("replay of `{}`: {}", env.command.join(" "), if same { "identical" } else { "differs" }),
        code: if same { 0 } else { 1 },
        raw: None,
    })
}

fn run(cli: &Cli) -> Result<Run, Failure> {
    match &cli.command {
        Command::Build { alpha } => cmd_build(alpha),
        Command::Verify { bundle, budgets } => cmd_verify(bundle, budgets, cli.seed),
        Command::Rank { tree, alpha } => cmd_rank(tree.as_deref(), alpha.as_deref()),
        Command::Game(g) => cmd_game(g, cli.seed),
        Command::Conv { kind } => cmd_conv(kind, cli.seed),
        Command::Export { bundle, alpha, format, depth, components } => {
            cmd_export(bundle.as_deref(), alpha.as_deref(), *format, *depth, *components)
        }
        Command::Replay { file } => cmd_replay(file),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let outcome = match run(&cli) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            return ExitCode::from(f.code);
        }
    };
    let envelope = Envelope { schema: ENVELOPE_SCHEMA, command: argv[1..].to_vec(), seed: cli.seed, result: outcome.result };
    let pretty = serde_json::to_string_pretty(&envelope).expect("envelope serializes") + "\n";
    if let Some(path) = &cli.out {
        let body = outcome.raw.as_deref().unwrap_or(&pretty);
        if let Err(e) = fs::write(path, body) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(3);
        }
    }
    // a closed pipe downstream is not an error of ours
    let mut stdout = std::io::stdout().lock();
    let _ = if cli.json { stdout.write_all(pretty.as_bytes()) } else { writeln!(stdout, "{}", outcome.text) };
    ExitCode::from(outcome.code)
}
