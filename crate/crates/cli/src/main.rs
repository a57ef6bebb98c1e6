//! `satisfice`: synthesis of strategies that satisfy a temporal goal and keep
//! the discounted sum of a game's costs above a threshold.
//!
//! Exit codes: 0 system wins, 10 environment wins, 1 a simulated play broke
//! its guarantee, 64 usage or malformed input, 65 invalid data file, 66 I/O
//! error, 75 time budget exhausted.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use satisfice::bench::sidecar;
use satisfice::ds::{Comparator, DiscountParams, Relation};

mod bench;
mod error;
mod input;
mod simulate;
mod synth;

use error::{create_dir, write, CliResult, Failure};
use input::{BenchKind, ScenarioArgs, ThresholdArgs};

#[derive(Parser, Debug)]
#[command(name = "satisfice", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a strategy for a game or a generated benchmark.
    Synth(synth::SynthArgs),
    /// Build a comparator automaton and print or save it.
    Comparator(ComparatorArgs),
    /// Replay a strategy against opponents and check its guarantee.
    Simulate(simulate::SimulateArgs),
    /// Sweep benchmark instances and record sizes and timings.
    Bench(bench::BenchArgs),
    /// Write a benchmark game, its formula and a JSON sidecar.
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
struct ComparatorArgs {
    /// Weight bound.
    #[arg(long, allow_hyphen_values = true)]
    mu: i64,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    p: u32,
    #[arg(long, default_value = "GEQ")]
    relation: Relation,
    #[command(flatten)]
    threshold: ThresholdArgs,
    /// Emit Graphviz DOT instead of the text format.
    #[arg(long)]
    dot: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    bench: BenchKind,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output directory for `game.txt`, `formula.txt` and `meta.json`.
    #[arg(long)]
    out_dir: PathBuf,
}

fn comparator(args: &ComparatorArgs) -> CliResult<i32> {
    let params = DiscountParams::new(args.k, args.p).map_err(Failure::usage)?;
    let c = Comparator::new(args.mu, params, args.relation, args.threshold.lasso()?)
        .map_err(|e| Failure::usage(format!("comparator: {e}")))?;
    let text = if args.dot { c.to_dot() } else { c.to_text() };
    match &args.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn generate(args: &GenerateArgs) -> CliResult<i32> {
    let scenario = args.scenario.scenario(args.bench, args.k)?;
    let (game, formula) = scenario
        .generate()
        .map_err(|e| Failure::usage(format!("generator: {e}")))?;
    let meta = sidecar(&scenario, &game, &formula);
    let json = serde_json::to_string_pretty(&meta).expect("sidecar serializes");
    create_dir(&args.out_dir)?;
    write(&args.out_dir.join("game.txt"), &game.to_text())?;
    write(&args.out_dir.join("formula.txt"), &format!("{formula}\n"))?;
    write(&args.out_dir.join("meta.json"), &format!("{json}\n"))?;
    println!("{} {} states {} edges", scenario.name(), game.num_states(), game.num_edges());
    Ok(0)
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { satisfice::pipeline::EXIT_USAGE } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match &cli.command {
        Command::Synth(a) => synth::run(a),
        Command::Comparator(a) => comparator(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Bench(a) => bench::run(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            eprintln!("error: {f}");
            std::process::exit(f.code);
        }
    }
}
