//! Case-study generators: the two-agent grid world and the conveyor belt.

pub mod belt;
pub mod grid;

pub use belt::{gen_belt, BeltConfig, BlockType, Palette};
pub use grid::{gen_grid, GridConfig, ObstaclePreset};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::QuantGame;
use crate::objective::FragmentFormula;

/// Bumped whenever generated games change for a fixed configuration.
pub const GENERATOR_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid layout: {0}")]
    Layout(String),
}

/// `⌊a / b⌋` for `b > 0`, rounding toward negative infinity.
pub fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "lowercase")]
pub enum Scenario {
    Grid(GridConfig),
    Belt(BeltConfig),
}

impl Scenario {
    pub fn generate(&self) -> Result<(QuantGame, FragmentFormula), GenError> {
        match self {
            Scenario::Grid(c) => gen_grid(c),
            Scenario::Belt(c) => gen_belt(c),
        }
    }

    pub fn k(&self) -> u32 {
        match self {
            Scenario::Grid(c) => c.k,
            Scenario::Belt(c) => c.k,
        }
    }

    pub fn positive_reward(&self) -> i64 {
        match self {
            Scenario::Grid(c) => c.positive_reward,
            Scenario::Belt(c) => c.positive_reward,
        }
    }

    /// Short instance name, e.g. `grid-n4-p10-m2-k2`.
    pub fn name(&self) -> String {
        match self {
            Scenario::Grid(c) => format!(
                "grid-n{}-p{}-m{}-k{}",
                c.n, c.positive_reward, -c.negative_reward, c.k
            ),
            Scenario::Belt(c) => format!(
                "belt-{}x{}-b{}-p{}-m{}-k{}",
                c.rows, c.cols, c.num_blocks, c.positive_reward, -c.negative_reward, c.k
            ),
        }
    }

    fn glossary(&self) -> Vec<(&'static str, &'static str)> {
        match self {
            Scenario::Grid(_) => vec![
                (grid::COLLISION_OBSTACLE, "the robot occupies an obstacle cell or left the grid"),
                (grid::COLLISION_HUMAN, "robot and human occupy the same cell"),
                (grid::REACH_BANANA, "the robot is on a banana cell"),
            ],
            Scenario::Belt(_) => vec![
                (belt::COLLISION, "robot and human arms occupy the same cell"),
                (
                    belt::BLOCK_HUMAN,
                    "the arms are adjacent and both adjacent to a block the human may grasp",
                ),
                (belt::DROPPED_CRITICAL, "a critical block has fallen off the belt so far"),
            ],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub generator_version: u32,
    pub config: Scenario,
    pub formula: String,
    pub propositions: Vec<GlossaryEntry>,
    pub states: usize,
    pub edges: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GlossaryEntry {
    pub name: String,
    pub meaning: String,
}

/// Metadata written next to a generated game file.
pub fn sidecar(scenario: &Scenario, game: &QuantGame, formula: &FragmentFormula) -> Sidecar {
    let glossary = scenario.glossary();
    Sidecar {
        generator_version: GENERATOR_VERSION,
        config: scenario.clone(),
        formula: formula.to_string(),
        propositions: game
            .propositions()
            .iter()
            .map(|p| GlossaryEntry {
                name: p.clone(),
                meaning: glossary
                    .iter()
                    .find(|(n, _)| n == p)
                    .map_or("", |(_, m)| m)
                    .to_string(),
            })
            .collect(),
        states: game.num_states(),
        edges: game.num_edges(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_toward_negative_infinity() {
        assert_eq!(floor_div(-2, 3), -1);
        assert_eq!(floor_div(-2, 1), -2);
        assert_eq!(floor_div(-5, 2), -3);
        assert_eq!(floor_div(-1, 7), -1);
    }

    #[test]
    fn generation_is_deterministic() {
        let s = Scenario::Grid(GridConfig::new(5, 10, -2, 2));
        let (a, _) = s.generate().unwrap();
        let (b, _) = s.generate().unwrap();
        assert_eq!(a.to_text(), b.to_text());
        let meta = sidecar(&s, &a, &s.generate().unwrap().1);
        assert_eq!(meta.propositions.len(), 3);
        assert!(serde_json::to_string(&meta).unwrap().contains("\"scenario\":\"grid\""));
    }
}
