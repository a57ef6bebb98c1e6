//! Conveyor belt shared by a robot (system) and a human (environment).
//!
//! The belt has `r` rows and `c` columns; blocks travel towards column 0 and
//! fall off after it. The robot's arm reaches rows `0..⌈r/2⌉`, the human's
//! rows `⌊r/2⌋..r`. One round:
//!
//! 1. the robot stays, moves its arm (two cells per turn when its column is
//!    more than one away from the human's, else one) or grasps the block
//!    under its arm;
//! 2. the belt advances one column and blocks leaving column 0 fall;
//! 3. the human stays, moves its arm one cell or grasps the block under it;
//! 4. the human refills column `c-1` with the removed block types, as many
//!    as fit, critical blocks only in robot rows.
//!
//! Steps 1-2 form the robot's move, steps 3-4 the human's. The state also
//! records whether the robot's last move was a grasp. Grasping a
//! desired block earns `positive_reward`; each desired block that falls
//! costs `negative_reward`; both add up on one edge.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::GenError;
use crate::game::{Edge, Player, PropSet, QuantGame, StateId};
use crate::objective::{parse_fragment, FragmentFormula};

pub const COLLISION: &str = "collision";
pub const BLOCK_HUMAN: &str = "block_human";
pub const DROPPED_CRITICAL: &str = "dropped_critical";

pub const FORMULA_TWO_BLOCK: &str = "G(!collision) & G(!block_human)";
pub const FORMULA_THREE_BLOCK: &str = "G(!collision) & G(!block_human) & G(!dropped_critical)";

/// Belt cells are packed two bits each into a `u64`.
pub const MAX_CELLS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BlockType {
    Critical = 1,
    Desired = 2,
    Human = 3,
}

impl BlockType {
    fn from_bits(b: u64) -> Option<Self> {
        match b {
            1 => Some(BlockType::Critical),
            2 => Some(BlockType::Desired),
            3 => Some(BlockType::Human),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Palette {
    /// Only desired blocks; the human may also grasp them.
    TwoBlock,
    /// One critical, one desired and one human block.
    ThreeBlock,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeltConfig {
    pub rows: u32,
    pub cols: u32,
    pub num_blocks: u32,
    pub palette: Palette,
    pub positive_reward: i64,
    pub negative_reward: i64,
    pub k: u32,
}

impl BeltConfig {
    pub fn two_block(rows: u32, cols: u32, positive_reward: i64, negative_reward: i64, k: u32) -> Self {
        BeltConfig {
            rows,
            cols,
            num_blocks: 2,
            palette: Palette::TwoBlock,
            positive_reward,
            negative_reward,
            k,
        }
    }

    pub fn three_block(rows: u32, cols: u32, positive_reward: i64, negative_reward: i64, k: u32) -> Self {
        BeltConfig {
            rows,
            cols,
            num_blocks: 3,
            palette: Palette::ThreeBlock,
            positive_reward,
            negative_reward,
            k,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidConfig(m));
        if self.rows < 2 || self.cols < 2 {
            return bad("belt needs at least 2 rows and 2 columns".into());
        }
        if self.rows * self.cols > MAX_CELLS {
            return bad(format!("belt has more than {MAX_CELLS} cells"));
        }
        if self.num_blocks == 0 || self.num_blocks > self.rows {
            return bad(format!(
                "number of blocks must be in 1..={}, got {}",
                self.rows, self.num_blocks
            ));
        }
        if self.palette == Palette::ThreeBlock && self.num_blocks != 3 {
            return bad("the three-block palette needs exactly 3 blocks".into());
        }
        if self.positive_reward <= 0 || self.negative_reward >= 0 {
            return bad("rewards must be positive / negative".into());
        }
        if self.k == 0 || self.k > 16 {
            return bad(format!("k must be in 1..=16, got {}", self.k));
        }
        Ok(())
    }

    fn robot_rows(&self) -> std::ops::Range<u32> {
        0..self.rows.div_ceil(2)
    }

    fn human_rows(&self) -> std::ops::Range<u32> {
        self.rows / 2..self.rows
    }

    fn blocks(&self) -> Vec<BlockType> {
        match self.palette {
            Palette::TwoBlock => vec![BlockType::Desired; self.num_blocks as usize],
            Palette::ThreeBlock => vec![BlockType::Critical, BlockType::Desired, BlockType::Human],
        }
    }

    fn robot_graspable(&self, b: BlockType) -> bool {
        matches!(b, BlockType::Critical | BlockType::Desired)
    }

    fn human_graspable(&self, b: BlockType) -> bool {
        match self.palette {
            Palette::TwoBlock => b == BlockType::Desired,
            Palette::ThreeBlock => b == BlockType::Human,
        }
    }

    pub fn formula_text(&self) -> &'static str {
        match self.palette {
            Palette::TwoBlock => FORMULA_TWO_BLOCK,
            Palette::ThreeBlock => FORMULA_THREE_BLOCK,
        }
    }
}

type Cell = (u32, u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Config {
    belt: u64,
    robot: Cell,
    human: Cell,
    turn: Player,
    dropped_critical: bool,
    /// The robot grasped a block on its last move. Keeps grasp-and-fall and
    /// fall-only rounds apart when they lead to the same belt.
    holding: bool,
}

struct Belt<'a> {
    cfg: &'a BeltConfig,
}

impl Belt<'_> {
    fn shift(&self, (row, col): Cell) -> u32 {
        2 * (row * self.cfg.cols + col)
    }

    fn get(&self, belt: u64, cell: Cell) -> Option<BlockType> {
        BlockType::from_bits(belt >> self.shift(cell) & 3)
    }

    fn set(&self, belt: u64, cell: Cell, b: Option<BlockType>) -> u64 {
        let s = self.shift(cell);
        (belt & !(3 << s)) | (b.map_or(0, |b| b as u64) << s)
    }

    fn present(&self, belt: u64) -> Vec<BlockType> {
        let mut v: Vec<BlockType> = (0..self.cfg.rows)
            .flat_map(|r| (0..self.cfg.cols).map(move |c| (r, c)))
            .filter_map(|cell| self.get(belt, cell))
            .collect();
        v.sort();
        v
    }

    fn missing(&self, belt: u64) -> Vec<BlockType> {
        let mut want = self.cfg.blocks();
        want.sort();
        for b in self.present(belt) {
            let i = want.iter().position(|&w| w == b).expect("palette block");
            want.remove(i);
        }
        want
    }

    /// Moves every block one column towards 0. Returns the new belt and the
    /// blocks that fell off.
    fn advance(&self, belt: u64) -> (u64, Vec<BlockType>) {
        let mut next = 0;
        let mut fallen = Vec::new();
        for r in 0..self.cfg.rows {
            for c in 0..self.cfg.cols {
                if let Some(b) = self.get(belt, (r, c)) {
                    if c == 0 {
                        fallen.push(b);
                    } else {
                        next = self.set(next, (r, c - 1), Some(b));
                    }
                }
            }
        }
        (next, fallen)
    }

    /// Every maximal placement of the missing blocks into free cells of the
    /// last column (critical blocks only in robot rows), deduplicated.
    fn refills(&self, belt: u64) -> Vec<u64> {
        let last = self.cfg.cols - 1;
        let free: Vec<u32> = (0..self.cfg.rows)
            .filter(|&r| self.get(belt, (r, last)).is_none())
            .collect();
        let missing = self.missing(belt);
        let mut results: Vec<(usize, u64)> = Vec::new();
        self.place(belt, &missing, &free, 0, &mut results);
        let best = results.iter().map(|r| r.0).max().unwrap_or(0);
        let mut out: Vec<u64> = results
            .into_iter()
            .filter(|r| r.0 == best)
            .map(|r| r.1)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn place(&self, belt: u64, missing: &[BlockType], free: &[u32], placed: usize, out: &mut Vec<(usize, u64)>) {
        let Some((&b, rest)) = missing.split_first() else {
            out.push((placed, belt));
            return;
        };
        let last = self.cfg.cols - 1;
        // Leave this block for a later turn.
        self.place(belt, rest, free, placed, out);
        for (i, &row) in free.iter().enumerate() {
            if b == BlockType::Critical && !self.cfg.robot_rows().contains(&row) {
                continue;
            }
            let mut remaining = free.to_vec();
            remaining.remove(i);
            let next = self.set(belt, (row, last), Some(b));
            self.place(next, rest, &remaining, placed + 1, out);
        }
    }

    /// Arm targets within `rows` at Manhattan distance `1..=reach`.
    fn arm_moves(&self, (row, col): Cell, rows: std::ops::Range<u32>, reach: u32) -> Vec<Cell> {
        let mut out = Vec::new();
        for r in rows {
            for c in 0..self.cfg.cols {
                let d = row.abs_diff(r) + col.abs_diff(c);
                if d >= 1 && d <= reach {
                    out.push((r, c));
                }
            }
        }
        out
    }

    fn label(&self, c: &Config) -> PropSet {
        let mut l = PropSet::EMPTY;
        if c.robot == c.human {
            l = l.with(0);
        }
        let adjacent = |a: Cell, b: Cell| a.0.abs_diff(b.0) + a.1.abs_diff(b.1) <= 1;
        if adjacent(c.robot, c.human) {
            let blocking = (0..self.cfg.rows)
                .flat_map(|r| (0..self.cfg.cols).map(move |col| (r, col)))
                .any(|cell| {
                    self.get(c.belt, cell)
                        .is_some_and(|b| self.cfg.human_graspable(b))
                        && adjacent(cell, c.robot)
                        && adjacent(cell, c.human)
                });
            if blocking {
                l = l.with(1);
            }
        }
        if c.dropped_critical {
            l = l.with(2);
        }
        l
    }
}

/// Builds the belt game and its objective.
pub fn gen_belt(cfg: &BeltConfig) -> Result<(QuantGame, FragmentFormula), GenError> {
    cfg.validate()?;
    let belt = Belt { cfg };
    let props: Vec<String> = match cfg.palette {
        Palette::TwoBlock => vec![COLLISION.into(), BLOCK_HUMAN.into()],
        Palette::ThreeBlock => vec![COLLISION.into(), BLOCK_HUMAN.into(), DROPPED_CRITICAL.into()],
    };
    let start = Config {
        belt: 0,
        robot: (0, 0),
        human: (cfg.rows - 1, cfg.cols - 1),
        turn: Player::Environment,
        dropped_critical: false,
        holding: false,
    };
    let mut index: HashMap<Config, StateId> = HashMap::from([(start, 0)]);
    let mut configs = vec![start];
    let mut edges = Vec::new();
    let mut i = 0;
    while i < configs.len() {
        let c = configs[i];
        let src = i as StateId;
        let mut moves: Vec<(Config, i64)> = Vec::new();
        match c.turn {
            Player::System => {
                let reach = if c.robot.1.abs_diff(c.human.1) > 1 { 2 } else { 1 };
                let mut actions: Vec<(Cell, u64, i64, bool)> = vec![(c.robot, c.belt, 0, false)];
                for cell in belt.arm_moves(c.robot, cfg.robot_rows(), reach) {
                    actions.push((cell, c.belt, 0, false));
                }
                if let Some(b) = belt.get(c.belt, c.robot).filter(|&b| cfg.robot_graspable(b)) {
                    let reward = if b == BlockType::Desired {
                        cfg.positive_reward
                    } else {
                        0
                    };
                    actions.push((c.robot, belt.set(c.belt, c.robot, None), reward, true));
                }
                for (robot, after_grasp, reward, holding) in actions {
                    let (advanced, fallen) = belt.advance(after_grasp);
                    let penalty = fallen.iter().filter(|&&b| b == BlockType::Desired).count() as i64
                        * cfg.negative_reward;
                    let next = Config {
                        belt: advanced,
                        robot,
                        turn: Player::Environment,
                        dropped_critical: c.dropped_critical || fallen.contains(&BlockType::Critical),
                        holding,
                        ..c
                    };
                    moves.push((next, reward + penalty));
                }
            }
            Player::Environment => {
                let mut actions: Vec<(Cell, u64)> = vec![(c.human, c.belt)];
                for cell in belt.arm_moves(c.human, cfg.human_rows(), 1) {
                    actions.push((cell, c.belt));
                }
                if belt.get(c.belt, c.human).is_some_and(|b| cfg.human_graspable(b)) {
                    actions.push((c.human, belt.set(c.belt, c.human, None)));
                }
                for (human, after_grasp) in actions {
                    for refilled in belt.refills(after_grasp) {
                        let next = Config {
                            belt: refilled,
                            human,
                            turn: Player::System,
                            ..c
                        };
                        moves.push((next, 0));
                    }
                }
            }
        }
        // Distinct actions can yield the same configuration.
        let mut seen: HashMap<Config, i64> = HashMap::new();
        for (next, cost) in moves {
            if let Some(&prev) = seen.get(&next) {
                if prev != cost {
                    return Err(GenError::InvalidConfig(format!(
                        "ambiguous cost for one transition ({prev} vs {cost})"
                    )));
                }
                continue;
            }
            seen.insert(next, cost);
            let dst = *index.entry(next).or_insert_with(|| {
                configs.push(next);
                (configs.len() - 1) as StateId
            });
            edges.push(Edge { src, dst, cost });
        }
        i += 1;
    }
    let owners = configs.iter().map(|c| c.turn).collect();
    let labels = configs.iter().map(|c| belt.label(c)).collect();
    let game = QuantGame::new(cfg.k, props, owners, labels, 0, edges)
        .map_err(|e| GenError::InvalidConfig(e.to_string()))?;
    let formula = parse_fragment(cfg.formula_text()).expect("well-formed");
    Ok((game, formula))
}
