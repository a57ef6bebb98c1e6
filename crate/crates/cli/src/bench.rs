use std::path::PathBuf;

use clap::Args;
use satisfice::pipeline::{plot_table, run_sweep, BenchInstance};

use crate::error::{create_dir, write, CliResult, Failure};
use crate::input::{BenchKind, Layout, ScenarioArgs};
use crate::synth::append_csv;

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub bench: BenchKind,
    /// Grid sides to sweep.
    #[arg(long, value_delimiter = ',', default_value = "4,6")]
    pub ns: Vec<u32>,
    /// Belt sizes to sweep, as ROWSxCOLS.
    #[arg(long, value_delimiter = ',', default_value = "4x3")]
    pub sizes: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub pos: Vec<i64>,
    #[arg(long, value_delimiter = ',', default_value = "-2", allow_hyphen_values = true)]
    pub neg: Vec<i64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub ks: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub ps: Vec<u32>,
    /// Grid obstacle layout.
    #[arg(long, value_enum, default_value_t = Layout::Center)]
    pub layout: Layout,
    #[arg(long, default_value_t = 2)]
    pub block_side: u32,
    /// Belt block palette: 2 or 3.
    #[arg(long, default_value_t = 2)]
    pub blocks: u32,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Per-instance wall-clock budget; late instances are recorded as TIMEOUT.
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// CSV file the records are appended to.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Directory for `plot.txt`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn parse_size(s: &str) -> CliResult<(u32, u32)> {
    let bad = || Failure::usage(format!("--sizes: `{s}` is not ROWSxCOLS"));
    let (r, c) = s.split_once('x').ok_or_else(bad)?;
    Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

pub fn instances(args: &BenchArgs) -> CliResult<Vec<BenchInstance>> {
    let mut sizes = Vec::new();
    match args.bench {
        BenchKind::Grid => sizes.extend(args.ns.iter().map(|&n| (n, 0))),
        BenchKind::Belt => {
            for s in &args.sizes {
                sizes.push(parse_size(s)?);
            }
        }
    }
    let mut out = Vec::new();
    for &(a, b) in &sizes {
        for &pos in &args.pos {
            for &neg in &args.neg {
                for &k in &args.ks {
                    for &p in &args.ps {
                        let sc = ScenarioArgs {
                            n: a,
                            layout: args.layout,
                            block_side: args.block_side,
                            rows: a,
                            cols: b,
                            blocks: args.blocks,
                            positive_reward: pos,
                            negative_reward: neg,
                        };
                        out.push(BenchInstance {
                            scenario: sc.scenario(args.bench, k)?,
                            p,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn run(args: &BenchArgs) -> CliResult<i32> {
    let instances = instances(args)?;
    let results = run_sweep(&instances, args.workers, args.timeout_ms);
    let mut records = Vec::with_capacity(results.len());
    let mut ran = Vec::with_capacity(results.len());
    let mut errors = 0;
    for (inst, r) in instances.iter().zip(results) {
        match r {
            Ok(rec) => {
                println!(
                    "{} {} product_states={} total_ms={:.3}",
                    rec.instance,
                    rec.winner,
                    rec.product_states,
                    rec.total_ms()
                );
                records.push(rec);
                ran.push(inst.clone());
            }
            Err(e) => {
                errors += 1;
                eprintln!("{}: {e}", inst.name());
            }
        }
    }
    if let Some(path) = &args.csv {
        append_csv(path, &records)?;
    }
    let table = plot_table(&ran, &records);
    match &args.out_dir {
        Some(dir) => {
            create_dir(dir)?;
            write(&dir.join("plot.txt"), &table)?;
        }
        None => print!("{table}"),
    }
    if errors > 0 {
        return Err(Failure::usage(format!("{errors} instance(s) could not be generated")));
    }
    Ok(0)
}
