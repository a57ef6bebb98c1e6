use std::fs::OpenOptions;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use satisfice::pipeline::{synthesize, write_csv, RunRecord, SynthError, SynthRequest};
use satisfice::product::ProductOrder;
use satisfice::Deadline;

use crate::error::{create_dir, write, CliResult, Failure};
use crate::input::{GameArgs, ObjectiveArgs, ThresholdArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    ComparatorFirst,
    ObjectiveFirst,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    /// Approximation parameter: eps = 2^-p.
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    /// Order in which the automata are synchronized with the game.
    #[arg(long, value_enum, default_value_t = Order::ComparatorFirst)]
    pub order: Order,
    /// Wall-clock budget; exceeding it exits with code 75.
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// Directory for strategy files and exports.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also export the product game as text and DOT into the output directory.
    #[arg(long, requires = "out_dir")]
    pub export_product: bool,
    /// CSV file the run record is appended to.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn run(args: &SynthArgs) -> CliResult<i32> {
    let loaded = args.game.load()?;
    let objective = args.objective.load(loaded.formula)?;
    let req = SynthRequest {
        name: loaded.name,
        game: loaded.game,
        objective,
        p: args.p,
        threshold: args.threshold.lasso()?,
        order: match args.order {
            Order::ComparatorFirst => ProductOrder::ComparatorFirst,
            Order::ObjectiveFirst => ProductOrder::ObjectiveFirst,
        },
        deadline: Deadline::from_millis(args.timeout_ms),
    };
    let outcome = synthesize(&req).map_err(|e| match e {
        SynthError::InvalidGame(_) => Failure::data(e),
        _ => Failure::usage(e),
    })?;
    let r = &outcome.record;
    println!("instance {}", r.instance);
    println!("winner {}", r.winner);
    println!("guarantee {}", outcome.guarantee());
    println!("game {} states {} edges", r.game_states, r.game_edges);
    println!("comparator {} states", r.comparator_states);
    println!("objective {} states", r.objective_states);
    println!("product {} states {} edges", r.product_states, r.product_edges);

    if let Some(dir) = &args.out_dir {
        create_dir(dir)?;
        if let Some(s) = &outcome.strategy {
            write(&dir.join("strategy.txt"), &s.to_text())?;
        }
        if let Some(s) = &outcome.counter_strategy {
            write(&dir.join("counter-strategy.txt"), &s.to_text())?;
        }
        if args.export_product {
            if let Some(p) = &outcome.product {
                write(&dir.join("product.txt"), &p.to_text())?;
                write(&dir.join("product.dot"), &p.to_dot())?;
            }
        }
    }
    if let Some(path) = &args.csv {
        append_csv(path, std::slice::from_ref(r))?;
    }
    Ok(outcome.winner().exit_code())
}

/// Appends records, writing the header only into an empty or new file.
pub fn append_csv(path: &Path, records: &[RunRecord]) -> CliResult<()> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Failure::io(path, e))?;
    let empty = file.metadata().map_err(|e| Failure::io(path, e))?.len() == 0;
    write_csv(file, records, empty).map_err(|e| Failure::io(path, std::io::Error::other(e)))
}
