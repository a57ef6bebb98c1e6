//! Shared flags: where the game comes from, the objective, the threshold.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use satisfice::bench::{BeltConfig, GridConfig, ObstaclePreset, Scenario};
use satisfice::ds::{parse_rational, LassoWord, Rational};
use satisfice::game::QuantGame;
use satisfice::objective::{parse_fragment, FragmentFormula, ParityAutomaton};
use satisfice::pipeline::ObjectiveSpec;

use crate::error::{read, CliResult, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchKind {
    Grid,
    Belt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    Center,
    Aisles,
    None,
}

/// Parameters of a generated scenario.
#[derive(Args, Clone, Debug)]
pub struct ScenarioArgs {
    /// Grid side length.
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    /// Grid obstacle layout.
    #[arg(long, value_enum, default_value_t = Layout::Center)]
    pub layout: Layout,
    /// Side of the centre block.
    #[arg(long, default_value_t = 2)]
    pub block_side: u32,
    /// Belt rows.
    #[arg(long, default_value_t = 4)]
    pub rows: u32,
    /// Belt columns.
    #[arg(long, default_value_t = 3)]
    pub cols: u32,
    /// Belt block palette: 2 (desired blocks only) or 3 (critical, desired, human).
    #[arg(long, default_value_t = 2)]
    pub blocks: u32,
    #[arg(long = "pos", default_value_t = 10)]
    pub positive_reward: i64,
    #[arg(long = "neg", default_value_t = -2, allow_hyphen_values = true)]
    pub negative_reward: i64,
}

impl ScenarioArgs {
    pub fn scenario(&self, kind: BenchKind, k: u32) -> CliResult<Scenario> {
        Ok(match kind {
            BenchKind::Grid => {
                let mut cfg = GridConfig::new(self.n, self.positive_reward, self.negative_reward, k);
                cfg.obstacles = match self.layout {
                    Layout::Center => ObstaclePreset::CenterBlock {
                        side: self.block_side,
                    },
                    Layout::Aisles => ObstaclePreset::Aisles,
                    Layout::None => ObstaclePreset::None,
                };
                Scenario::Grid(cfg)
            }
            BenchKind::Belt => {
                let (r, c, pos, neg) = (self.rows, self.cols, self.positive_reward, self.negative_reward);
                Scenario::Belt(match self.blocks {
                    2 => BeltConfig::two_block(r, c, pos, neg, k),
                    3 => BeltConfig::three_block(r, c, pos, neg, k),
                    b => return Err(Failure::usage(format!("--blocks must be 2 or 3, got {b}"))),
                })
            }
        })
    }
}

#[derive(Args, Clone, Debug)]
pub struct GameArgs {
    /// Game file (`quantgame v1` text, or JSON when the name ends in `.json`).
    #[arg(long, conflicts_with = "bench")]
    pub game: Option<PathBuf>,
    /// Generate a benchmark game instead of reading one.
    #[arg(long, value_enum)]
    pub bench: Option<BenchKind>,
    /// Discount parameter: d = 1 + 2^-k. Overrides the game file's value.
    #[arg(long)]
    pub k: Option<u32>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

/// A loaded game with the formula its generator suggests, if any.
pub struct LoadedGame {
    pub name: String,
    pub game: QuantGame,
    pub formula: Option<FragmentFormula>,
}

impl GameArgs {
    pub fn load(&self) -> CliResult<LoadedGame> {
        match (&self.game, self.bench) {
            (Some(path), _) => {
                let text = read(path)?;
                let parsed = if path.extension().is_some_and(|e| e == "json") {
                    QuantGame::from_json(&text)
                } else {
                    QuantGame::from_text(&text)
                };
                let game = parsed.map_err(|e| Failure::data(format!("game {}: {e}", path.display())))?;
                let game = match self.k {
                    Some(k) => game.with_k(k),
                    None => game,
                };
                let name = path
                    .file_stem()
                    .map_or_else(|| "game".into(), |s| s.to_string_lossy().into_owned());
                Ok(LoadedGame {
                    name,
                    game,
                    formula: None,
                })
            }
            (None, Some(kind)) => {
                let scenario = self.scenario.scenario(kind, self.k.unwrap_or(1))?;
                let (game, formula) = scenario
                    .generate()
                    .map_err(|e| Failure::usage(format!("generator: {e}")))?;
                Ok(LoadedGame {
                    name: scenario.name(),
                    game,
                    formula: Some(formula),
                })
            }
            (None, None) => Err(Failure::usage("one of --game or --bench is required")),
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct ObjectiveArgs {
    /// Formula of the G/F fragment, e.g. `G(!hazard) & F(goal)`.
    #[arg(long, conflicts_with_all = ["formula_file", "dpa"])]
    pub formula: Option<String>,
    /// File holding a fragment formula.
    #[arg(long, conflicts_with = "dpa")]
    pub formula_file: Option<PathBuf>,
    /// Deterministic parity automaton (`dpa v1` text).
    #[arg(long)]
    pub dpa: Option<PathBuf>,
}

impl ObjectiveArgs {
    /// The explicit objective, or `fallback` when none was given.
    pub fn load(&self, fallback: Option<FragmentFormula>) -> CliResult<ObjectiveSpec> {
        let parse = |text: &str| {
            parse_fragment(text.trim()).map_err(|e| Failure::usage(format!("formula: {e}")))
        };
        if let Some(text) = &self.formula {
            return parse(text).map(ObjectiveSpec::Fragment);
        }
        if let Some(path) = &self.formula_file {
            return parse(&read(path)?).map(ObjectiveSpec::Fragment);
        }
        if let Some(path) = &self.dpa {
            let dpa = ParityAutomaton::from_text(&read(path)?)
                .map_err(|e| Failure::data(format!("objective: {e}")))?;
            return Ok(ObjectiveSpec::Parity(dpa));
        }
        Ok(fallback.map_or(ObjectiveSpec::None, ObjectiveSpec::Fragment))
    }
}

#[derive(Args, Clone, Debug)]
pub struct ThresholdArgs {
    /// Comma-separated prefix of the threshold lasso (integers, `a/b` or decimals).
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub threshold_prefix: String,
    /// Comma-separated cycle of the threshold lasso.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub threshold_cycle: String,
}

impl ThresholdArgs {
    pub fn lasso(&self) -> CliResult<LassoWord> {
        let prefix = parse_list(&self.threshold_prefix, "--threshold-prefix")?;
        let cycle = parse_list(&self.threshold_cycle, "--threshold-cycle")?;
        if cycle.is_empty() {
            return Err(Failure::usage("--threshold-cycle must not be empty"));
        }
        Ok(LassoWord::new(prefix, cycle))
    }
}

fn parse_list(text: &str, flag: &str) -> CliResult<Vec<Rational>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            parse_rational(s).ok_or_else(|| Failure::usage(format!("{flag}: `{s}` is not a number")))
        })
        .collect()
}
