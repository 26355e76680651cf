//! `shadowmatch`: run one-pass matchers on edge streams, compare them
//! against the exact optimum, generate instances and tabulate the ratio bound.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use shadow_matching::baseline::{BaselineState, GammaPreset};
use shadow_matching::bound::{approx_bound, optimal_k, ratio_table};
use shadow_matching::graph::{open_stream, write_stream};
use shadow_matching::harness::experiment::{aggregate, execute_run, oracle_weight, stream_orders};
use shadow_matching::harness::{
    emit_aggregates, emit_report, generate, Algorithm, GeneratorSpec, GraphKind, Instance, OrderPlan, ReportFormat,
    WeightDist,
};
use shadow_matching::oracle::{DenseGraph, DEFAULT_EDGE_LIMIT};
use shadow_matching::shadow::MatcherState;
use shadow_matching::trace::{write_trace, TraceRecord};
use shadow_matching::verifier::check_locally_k_exceeding;
use shadow_matching::{DuplicatePolicy, Edge, EdgeStream, StreamingMatcher};

#[derive(Parser, Debug)]
#[command(name = "shadowmatch", version, about = "One-pass semi-streaming weighted matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a matcher over a stream file and print the matching.
    Run(RunArgs),
    /// Compare the shadow matcher and both baselines against the optimum.
    Compare(CompareArgs),
    /// Generate an instance as a stream file.
    Gen(GenArgs),
    /// Tabulate the worst-case ratio bound and its minimizer.
    Bound(BoundArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Shadow,
    Baseline,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Stream file (`-` or omitted reads stdin).
    input: Option<PathBuf>,
    /// Skip repeated endpoint pairs with a warning instead of failing.
    #[arg(long)]
    skip_duplicates: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "shadow")]
    algo: Algo,
    /// Gain factor of the shadow matcher (default: the minimizer of the bound).
    #[arg(long)]
    k: Option<f64>,
    /// Replacement threshold of the baseline.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Write one JSON record per input edge to this file.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Check every insertion for an allocation function with exact arithmetic.
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: Option<f64>,
    /// Number of seeded random stream orders (0 keeps the file order).
    #[arg(long, default_value_t = 0)]
    orders: usize,
    /// Run every permutation of the stream.
    #[arg(long, conflicts_with = "orders")]
    all_orders: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    /// Skip the exact optimum.
    #[arg(long)]
    no_oracle: bool,
    #[arg(long, default_value_t = DEFAULT_EDGE_LIMIT)]
    oracle_limit: usize,
    #[arg(long)]
    verify: bool,
    /// Worker threads for the stream orders.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Gnp,
    Complete,
    Path,
    Cycle,
    GeometricChain,
    ShadowGadget,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Edge probability for `gnp`.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Weight ratio for `geometric-chain`.
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// `uniform:LO:HI`, `int:LO:HI`, `pow:Q:MAX_EXP` or `list:W1,W2,...`.
    #[arg(long, default_value = "uniform:1:100")]
    weights: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (default stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Evaluate the bound at a single k.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = 1.1)]
    from: f64,
    #[arg(long, default_value_t = 3.0)]
    to: f64,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Verification(m) => m,
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn input(e: impl ToString) -> Failure {
    Failure::Input(e.to_string())
}

fn default_k() -> f64 {
    optimal_k::<f64>().0
}

fn policy(args: &InputArgs) -> DuplicatePolicy {
    if args.skip_duplicates {
        DuplicatePolicy::SkipWithWarning
    } else {
        DuplicatePolicy::Error
    }
}

fn open_input(args: &InputArgs) -> Result<EdgeStream<f64>, Failure> {
    match &args.input {
        Some(p) if p.as_os_str() != "-" => {
            open_stream(p, policy(args)).map_err(|e| input(format!("{}: {e}", p.display())))
        }
        _ => EdgeStream::from_reader(BufReader::new(io::stdin()), "<stdin>", policy(args)).map_err(input),
    }
}

fn print_matching(out: &mut String, weight: f64, mut edges: Vec<Edge<f64>>) {
    edges.sort();
    let _ = writeln!(out, "weight {weight}");
    let _ = writeln!(out, "edges {}", edges.len());
    for e in edges {
        let _ = writeln!(out, "{e}");
    }
}

fn cmd_run(args: RunArgs) -> Result<String, Failure> {
    let mut out = String::new();
    match args.algo {
        Algo::Baseline => {
            if args.trace.is_some() || args.verify {
                return Err(usage("--trace and --verify apply to the shadow matcher only"));
            }
            let mut state = BaselineState::new(args.gamma).map_err(usage)?;
            let stream = open_input(&args.input)?;
            for e in stream {
                state.process_edge(e.map_err(input)?).map_err(input)?;
            }
            print_matching(&mut out, state.matching_weight(), state.matching_edges());
            Ok(out)
        }
        Algo::Shadow => {
            let k = args.k.unwrap_or_else(default_k);
            let mut state = MatcherState::new(k).map_err(usage)?;
            let stream = open_input(&args.input)?;
            let mut records = Vec::new();
            let (mut passes, mut failures) = (0u64, 0u64);
            for (i, e) in stream.enumerate() {
                let ev = state.process_edge_traced(i, e.map_err(input)?).map_err(input)?;
                let check = if args.verify && ev.decision.inserted {
                    let c = check_locally_k_exceeding(&ev.decision, k)
                        .map_err(|e| Failure::Verification(format!("edge {i}: {e}")))?;
                    if c.feasible {
                        passes += 1;
                    } else {
                        failures += 1;
                        eprintln!("edge {i} ({}): inserted set admits no allocation function", ev.input);
                    }
                    Some(c)
                } else {
                    None
                };
                if args.trace.is_some() {
                    records.push(TraceRecord::from_event(&ev, check.as_ref()));
                }
            }
            if let Some(path) = &args.trace {
                let file = File::create(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
                let mut w = BufWriter::new(file);
                write_trace(&mut w, &records)
                    .and_then(|_| w.flush())
                    .map_err(|e| input(format!("{}: {e}", path.display())))?;
            }
            print_matching(&mut out, state.matching_weight(), state.matching_edges());
            if args.verify {
                let _ = writeln!(out, "verified {passes} insertions, {failures} failures");
            }
            if failures > 0 {
                print!("{out}");
                return Err(Failure::Verification(format!(
                    "{failures} insertions failed verification"
                )));
            }
            Ok(out)
        }
    }
}

fn instance_id(args: &InputArgs) -> String {
    match &args.input {
        Some(p) if p.as_os_str() != "-" => p
            .file_stem()
            .map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned()),
        _ => "stdin".into(),
    }
}

fn cmd_compare(args: CompareArgs) -> Result<String, Failure> {
    let k = args.k.unwrap_or_else(default_k);
    MatcherState::<f64>::new(k).map_err(usage)?;
    if args.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let edges: Vec<Edge<f64>> = open_input(&args.input)?.collect::<Result<_, _>>().map_err(input)?;
    if args.all_orders && edges.len() > 9 {
        return Err(usage(format!(
            "--all-orders on {} edges is too many permutations",
            edges.len()
        )));
    }
    let graph = DenseGraph::new(edges.clone()).map_err(input)?;
    let instance = Instance::new(instance_id(&args.input), graph, edges);

    let algorithms = [
        Algorithm::Shadow { k },
        Algorithm::Baseline {
            gamma: GammaPreset::RatioSix.gamma(),
        },
        Algorithm::Baseline {
            gamma: GammaPreset::RatioFivePointEightTwoEight.gamma(),
        },
    ];
    let plan = if args.all_orders {
        OrderPlan::Exhaustive
    } else if args.orders > 0 {
        OrderPlan::Random {
            count: args.orders,
            seed: args.seed,
        }
    } else {
        OrderPlan::Given
    };
    let limit = (!args.no_oracle).then_some(args.oracle_limit);
    // logs a warning when the instance is over the limit
    let (opt, skipped) = oracle_weight(&instance, limit).map_err(input)?;

    let orders = stream_orders(&instance, plan);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(usage)?;
    let reports = pool
        .install(|| {
            orders
                .par_iter()
                .flat_map_iter(|(seed, order)| {
                    algorithms
                        .iter()
                        .map(|&a| execute_run(&instance, order, *seed, a, opt, skipped, args.verify))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(input)?;
    let aggregates = aggregate(&reports);

    let out = match args.format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "reports": reports, "aggregates": aggregates }))
                .map_err(input)?;
            s.push('\n');
            s
        }
        format => {
            let mut s = emit_report(&reports, format).map_err(input)?;
            if format == ReportFormat::Table {
                s.push('\n');
                s.push_str(&emit_aggregates(&aggregates));
            }
            s
        }
    };
    let failures: u64 = reports.iter().map(|r| r.failures()).sum();
    if failures > 0 {
        print!("{out}");
        return Err(Failure::Verification(format!("{failures} checks failed")));
    }
    Ok(out)
}

fn parse_weights(text: &str) -> Result<WeightDist, Failure> {
    let bad = || usage(format!("bad weight distribution `{text}`"));
    let (name, rest) = text.split_once(':').ok_or_else(bad)?;
    let nums = |n: usize| -> Result<Vec<f64>, Failure> {
        let v: Vec<f64> = rest
            .split(':')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        if v.len() == n {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    Ok(match name {
        "uniform" => {
            let v = nums(2)?;
            WeightDist::Uniform { lo: v[0], hi: v[1] }
        }
        "int" => {
            let v = nums(2)?;
            WeightDist::IntegerUniform {
                lo: v[0] as u32,
                hi: v[1] as u32,
            }
        }
        "pow" => {
            let v = nums(2)?;
            WeightDist::PowersOf {
                q: v[0],
                max_exp: v[1] as u32,
            }
        }
        "list" => WeightDist::Explicit(
            rest.split(',')
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?,
        ),
        _ => return Err(bad()),
    })
}

fn cmd_gen(args: GenArgs) -> Result<String, Failure> {
    let kind = match args.kind {
        Kind::Gnp => GraphKind::Gnp { p: args.p },
        Kind::Complete => GraphKind::Complete,
        Kind::Path => GraphKind::Path,
        Kind::Cycle => GraphKind::Cycle,
        Kind::GeometricChain => GraphKind::GeometricChain { q: args.q },
        Kind::ShadowGadget => GraphKind::ShadowGadget,
    };
    let spec = GeneratorSpec::new(kind, args.n, parse_weights(&args.weights)?, args.seed);
    let instance = generate(&spec).map_err(usage)?;
    let mut buf = Vec::new();
    write_stream(&mut buf, instance.graph.vertex_count(), &instance.order).map_err(input)?;
    let text = String::from_utf8(buf).map_err(input)?;
    match &args.output {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn cmd_bound(args: BoundArgs) -> Result<String, Failure> {
    let mut out = String::new();
    if let Some(k) = args.k {
        let r = approx_bound(k).map_err(usage)?;
        let _ = writeln!(out, "k = {k:.6}  ratio = {r:.6}");
        return Ok(out);
    }
    let rows = ratio_table(args.from, args.to, args.step).map_err(usage)?;
    let _ = writeln!(out, "{:>7}  {:>10}", "k", "ratio");
    for (k, r) in rows {
        let _ = writeln!(out, "{k:>7.3}  {r:>10.6}");
    }
    let (k, r) = optimal_k::<f64>();
    let _ = writeln!(out, "minimizer: k* = {k:.6}  bound* = {r:.6}");
    Ok(out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bound(a) => cmd_bound(a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
