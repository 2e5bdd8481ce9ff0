use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hptree::discovery::{DiscoveryConfig, Mode};
use hptree::heuristics::{HeuristicConfig, HeuristicKind};
use hptree::tree::Depth;
use hptree_cli::bench::{self, BenchConfig, Suite};
use hptree_cli::pipeline::{self, Failure, Format, RunConfig, Window};
use hptree_cli::serve::{self, AppState};

#[derive(Parser)]
#[command(name = "hptree", version, about = "Hierarchical process discovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discover a model from a log and export it.
    Discover(DiscoverArgs),
    /// Time the discovery modes on synthetic log families; writes CSV.
    Bench(BenchArgs),
    /// Serve the interactive workbench for one log.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Heuristic {
    None,
    NestedCalls,
    StructuredNames,
    AttributeCombination,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Naive,
    Rad,
    Flat,
}

#[derive(Args)]
struct LogArgs {
    /// XES or CSV event log.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "none")]
    heuristic: Heuristic,
    /// Separator for structured names.
    #[arg(long, default_value = ".")]
    separator: String,
    /// Attribute keys for attribute combination, comma separated.
    #[arg(long, value_delimiter = ',')]
    attr_keys: Vec<String>,
    #[arg(long, value_enum, default_value = "rad")]
    mode: ModeArg,
}

impl LogArgs {
    fn heuristic(&self) -> HeuristicConfig {
        HeuristicConfig {
            kind: match self.heuristic {
                Heuristic::None => HeuristicKind::None,
                Heuristic::NestedCalls => HeuristicKind::NestedCalls,
                Heuristic::StructuredNames => HeuristicKind::StructuredNames,
                Heuristic::AttributeCombination => HeuristicKind::AttributeCombination,
            },
            separator: self.separator.clone(),
            attr_keys: self.attr_keys.clone(),
        }
    }

    fn mode(&self) -> Mode {
        match self.mode {
            ModeArg::Naive => Mode::Naive,
            ModeArg::Rad => Mode::Rad,
            ModeArg::Flat => Mode::Flat,
        }
    }
}

#[derive(Args)]
struct DiscoverArgs {
    #[command(flatten)]
    log: LogArgs,
    /// Share of directly-follows behavior to keep, in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    paths: f64,
    #[arg(long, default_value_t = 0)]
    min_depth: usize,
    /// A natural number or `inf`.
    #[arg(long, default_value = "inf")]
    max_depth: Depth,
    /// tree, dot, pnml or json.
    #[arg(long, default_value = "tree")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// depth-scaling or trace-length-scaling.
    #[arg(long)]
    suite: Suite,
    #[arg(long, default_value_t = 30)]
    repetitions: usize,
    #[arg(long, default_value_t = 3)]
    warmup: usize,
    #[arg(long, default_value_t = hptree::synthetic::TRACES)]
    traces: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Stop after this family parameter.
    #[arg(long)]
    max_param: Option<usize>,
    /// CSV report; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    log: LogArgs,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
}

fn write_out(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())
        }
    }
}

fn discover(args: DiscoverArgs) -> Result<(), Failure> {
    let log = pipeline::load_log(&args.log.input, &args.log.heuristic())?;
    let s = log.stats();
    eprintln!(
        "log: {} traces, {} events, depth {}, {} activities, avg length {:.2}",
        s.traces,
        s.events,
        s.depth,
        s.alphabet.len(),
        s.avg_trace_len
    );
    let config = RunConfig {
        heuristic: args.log.heuristic(),
        discovery: DiscoveryConfig::new(args.log.mode(), args.paths),
        window: Window {
            min_depth: args.min_depth,
            max_depth: args.max_depth,
        },
        format: args.format,
    };
    let start = Instant::now();
    let (tree, out) = pipeline::run(&log, &config)?;
    eprintln!(
        "model: {} nodes, {} activity leaves; {:.2} ms",
        tree.size(),
        tree.activity_leaves(),
        start.elapsed().as_secs_f64() * 1e3
    );
    write_out(args.out.as_ref(), &out).map_err(|e| Failure::Export(format!("cannot write output: {e}")))
}

fn run_bench(args: BenchArgs) -> anyhow::Result<()> {
    let config = BenchConfig {
        suite: args.suite,
        repetitions: args.repetitions,
        warmup: args.warmup,
        traces: args.traces,
        seed: args.seed,
        max_param: args.max_param,
    };
    let rows = bench::run(&config, |r| {
        eprintln!("{} {} {}: {:.3} ms", r.suite, r.mode, r.param, r.mean_ms)
    });
    match &args.out {
        Some(p) => {
            let f = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            bench::write_csv(&rows, f)?;
        }
        None => bench::write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(())
}

fn run_serve(args: ServeArgs) -> Result<(), Failure> {
    let log = pipeline::load_log(&args.log.input, &args.log.heuristic())?;
    let state = Arc::new(AppState::new(log, args.log.mode()));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Input(e.to_string()))?;
    runtime
        .block_on(serve::serve(state, SocketAddr::new(args.host, args.port)))
        .map_err(|e| Failure::Input(format!("server: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Discover(a) => discover(a),
        Command::Serve(a) => run_serve(a),
        Command::Bench(a) => {
            return match run_bench(a) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
