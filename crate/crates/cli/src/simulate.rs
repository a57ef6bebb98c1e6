use std::path::PathBuf;

use clap::{Args, ValueEnum};
use satisfice::ds::{dsum_lasso, int_word, DiscountParams};
use satisfice::game::{LassoPlay, Player, QuantGame};
use satisfice::objective::{eval_fragment_on_lasso, Objective};
use satisfice::pipeline::ObjectiveSpec;
use satisfice::solver::{simulate, FiniteMemoryStrategy};

use crate::error::{read, CliResult, Failure};
use crate::input::{GameArgs, ObjectiveArgs, ThresholdArgs};

/// Exit code when some play breaks the strategy's guarantee.
pub const EXIT_VIOLATION: i32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Opponents {
    /// The strategy given with `--opponent`.
    Adversarial,
    /// `--rounds` random memoryless strategies seeded from `--seed`.
    Random,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Strategy under test (either player).
    #[arg(long)]
    pub strategy: PathBuf,
    #[arg(long, value_enum, default_value_t = Opponents::Random)]
    pub env: Opponents,
    /// Opponent strategy for adversarial mode.
    #[arg(long, required_if_eq("env", "adversarial"))]
    pub opponent: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random opponents.
    #[arg(long, default_value_t = 50)]
    pub rounds: u32,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    /// Approximation parameter used for the environment's guarantee.
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
}

fn load_strategy(path: &PathBuf) -> CliResult<FiniteMemoryStrategy> {
    FiniteMemoryStrategy::from_text(&read(path)?)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn fmt_states(states: &[u32]) -> String {
    let v: Vec<String> = states.iter().map(|s| s.to_string()).collect();
    v.join(" ")
}

pub fn run(args: &SimulateArgs) -> CliResult<i32> {
    let loaded = args.game.load()?;
    let g = &loaded.game;
    let objective = args.objective.load(loaded.formula)?;
    let bound = match &objective {
        ObjectiveSpec::Parity(a) => Some(
            Objective::parity(a, g.propositions()).map_err(|e| Failure::usage(format!("objective: {e}")))?,
        ),
        _ => None,
    };
    let params = DiscountParams::new(g.k(), args.p).map_err(Failure::usage)?;
    let d = params.discount();
    let v = dsum_lasso(&args.threshold.lasso()?, &d);
    let tested = load_strategy(&args.strategy)?;
    let player = tested.player();

    let opponents: Vec<(String, FiniteMemoryStrategy)> = match args.env {
        Opponents::Adversarial => {
            let path = args.opponent.as_ref().expect("required by clap");
            let o = load_strategy(path)?;
            if o.player() == player {
                return Err(Failure::usage("opponent strategy belongs to the same player"));
            }
            vec![("adversarial".into(), o)]
        }
        Opponents::Random => (0..args.rounds as u64)
            .map(|i| {
                let seed = args.seed + i;
                let o = FiniteMemoryStrategy::random_memoryless(g, player.opponent(), seed);
                (format!("random-{seed}"), o)
            })
            .collect(),
    };

    let holds = |play: &LassoPlay| -> CliResult<Option<bool>> {
        let labels = g.label_sequence(play).map_err(Failure::data)?;
        Ok(match &objective {
            ObjectiveSpec::None => None,
            ObjectiveSpec::Fragment(f) => Some(
                eval_fragment_on_lasso(f, g.propositions(), &labels)
                    .map_err(|e| Failure::usage(format!("objective: {e}")))?,
            ),
            ObjectiveSpec::Parity(_) => Some(bound.as_ref().expect("bound above").accepts(&labels)),
        })
    };

    let mut failed = 0;
    for (name, opp) in &opponents {
        let (sys, env) = match player {
            Player::System => (&tested, opp),
            Player::Environment => (opp, &tested),
        };
        let play = simulate(g, sys, env).map_err(Failure::data)?;
        let dsum = dsum_lasso(&int_word(&cost_sequence(g, &play)?), &d);
        let objective_holds = holds(&play)?;
        let pass = match player {
            Player::System => dsum >= v && objective_holds != Some(false),
            Player::Environment => {
                dsum < &v + params.approximation_bound() || objective_holds == Some(false)
            }
        };
        if !pass {
            failed += 1;
        }
        println!(
            "play {name} prefix [{}] cycle [{}] dsum {dsum} objective {} {}",
            fmt_states(&play.prefix),
            fmt_states(&play.cycle),
            objective_holds.map_or("-".to_string(), |b| b.to_string()),
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "summary {} strategy, {} plays, {} failed: {}",
        player,
        opponents.len(),
        failed,
        if failed == 0 { "PASS" } else { "FAIL" }
    );
    Ok(if failed == 0 { 0 } else { EXIT_VIOLATION })
}

fn cost_sequence(g: &QuantGame, play: &LassoPlay) -> CliResult<satisfice::Lasso<i64>> {
    g.cost_sequence(play).map_err(Failure::data)
}
