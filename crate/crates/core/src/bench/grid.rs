//! Two-agent grid world: a human (environment) and a robot (system) move on
//! an `n × n` grid with static obstacles. The human starts at `(0, 0)` and
//! moves first, the robot starts at `(n-1, n-1)`, and bananas lie in the two
//! other corners.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{floor_div, GenError};
use crate::game::{Edge, Player, PropSet, QuantGame, StateId};
use crate::objective::{parse_fragment, FragmentFormula};

pub const REACH_BANANA: &str = "reach_banana";
pub const COLLISION_OBSTACLE: &str = "collision_obstacle";
pub const COLLISION_HUMAN: &str = "collision_human";

pub const GRID_FORMULA: &str = "G(!collision_obstacle) & G(!collision_human) & F(reach_banana)";

pub type Cell = (u32, u32);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ObstaclePreset {
    None,
    /// Square block of the given side centred in the grid.
    CenterBlock { side: u32 },
    /// Vertical shelves in columns 2, 5, 8, ... leaving the first and last
    /// rows free.
    Aisles,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: u32,
    pub obstacles: ObstaclePreset,
    /// Explicit obstacle cells; replaces the preset when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle_cells: Option<Vec<Cell>>,
    pub positive_reward: i64,
    pub negative_reward: i64,
    pub k: u32,
}

impl GridConfig {
    /// The default layout: a 2×2 centre block.
    pub fn new(n: u32, positive_reward: i64, negative_reward: i64, k: u32) -> Self {
        GridConfig {
            n,
            obstacles: ObstaclePreset::CenterBlock { side: 2 },
            obstacle_cells: None,
            positive_reward,
            negative_reward,
            k,
        }
    }

    pub fn human_start(&self) -> Cell {
        (0, 0)
    }

    pub fn robot_start(&self) -> Cell {
        (self.n - 1, self.n - 1)
    }

    pub fn bananas(&self) -> [Cell; 2] {
        [(0, self.n - 1), (self.n - 1, 0)]
    }

    pub fn obstacle_list(&self) -> Vec<Cell> {
        if let Some(cells) = &self.obstacle_cells {
            let mut cells = cells.clone();
            cells.sort_unstable();
            cells.dedup();
            return cells;
        }
        let n = self.n;
        match self.obstacles {
            ObstaclePreset::None => vec![],
            ObstaclePreset::CenterBlock { side } => {
                let lo = n.saturating_sub(side) / 2;
                let hi = (lo + side).min(n);
                (lo..hi).flat_map(|x| (lo..hi).map(move |y| (x, y))).collect()
            }
            ObstaclePreset::Aisles => (2..n.saturating_sub(1))
                .step_by(3)
                .flat_map(|x| (1..n - 1).map(move |y| (x, y)))
                .collect(),
        }
    }

    fn obstacle_mask(&self) -> Vec<bool> {
        let n = self.n as usize;
        let mut mask = vec![false; n * n];
        for (x, y) in self.obstacle_list() {
            mask[y as usize * n + x as usize] = true;
        }
        mask
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidConfig(m));
        if self.n < 3 || self.n > 64 {
            return bad(format!("grid side must be in 3..=64, got {}", self.n));
        }
        if self.positive_reward <= 0 {
            return bad("positive_reward must be positive".into());
        }
        if self.negative_reward >= 0 {
            return bad("negative_reward must be negative".into());
        }
        if self.k == 0 || self.k > 16 {
            return bad(format!("k must be in 1..=16, got {}", self.k));
        }
        let n = self.n;
        let obstacles = self.obstacle_list();
        if let Some(c) = obstacles.iter().find(|(x, y)| *x >= n || *y >= n) {
            return Err(GenError::Layout(format!("obstacle {c:?} is off the grid")));
        }
        let mask = self.obstacle_mask();
        let blocked = |(x, y): Cell| mask[y as usize * n as usize + x as usize];
        for (what, c) in [
            ("human start", self.human_start()),
            ("robot start", self.robot_start()),
            ("banana", self.bananas()[0]),
            ("banana", self.bananas()[1]),
        ] {
            if blocked(c) {
                return Err(GenError::Layout(format!("{what} {c:?} is an obstacle")));
            }
        }
        let free = (n * n) as usize - mask.iter().filter(|b| **b).count();
        let mut seen = vec![false; (n * n) as usize];
        let mut queue = VecDeque::from([self.human_start()]);
        seen[0] = true;
        let mut count = 0;
        while let Some(c) = queue.pop_front() {
            count += 1;
            for d in cardinal(c, n) {
                let i = (d.1 * n + d.0) as usize;
                if !seen[i] && !mask[i] {
                    seen[i] = true;
                    queue.push_back(d);
                }
            }
        }
        if count != free {
            return Err(GenError::Layout("free space is disconnected".into()));
        }
        Ok(())
    }
}

/// On-grid cardinal neighbours in the fixed order N, S, W, E.
fn cardinal((x, y): Cell, n: u32) -> impl Iterator<Item = Cell> {
    let cand = [
        (y > 0).then(|| (x, y.wrapping_sub(1))),
        (y + 1 < n).then_some((x, y + 1)),
        (x > 0).then(|| (x.wrapping_sub(1), y)),
        (x + 1 < n).then_some((x + 1, y)),
    ];
    cand.into_iter().flatten()
}

fn manhattan(a: Cell, b: Cell) -> i64 {
    (a.0 as i64 - b.0 as i64).abs() + (a.1 as i64 - b.1 as i64).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Config {
    human: Cell,
    robot: Cell,
    turn: Player,
    claims: u8,
}

/// Distance component of the reward: `⌊neg / manhattan⌋`, or `neg` when the
/// agents share a cell.
pub fn distance_cost(negative_reward: i64, robot: Cell, human: Cell) -> i64 {
    match manhattan(robot, human) {
        0 => negative_reward,
        d => floor_div(negative_reward, d),
    }
}

/// Builds the grid game and its objective.
pub fn gen_grid(cfg: &GridConfig) -> Result<(QuantGame, FragmentFormula), GenError> {
    cfg.validate()?;
    let n = cfg.n;
    let mask = cfg.obstacle_mask();
    let blocked = |(x, y): Cell| mask[(y * n + x) as usize];
    let bananas = cfg.bananas();
    let props: Vec<String> = [COLLISION_OBSTACLE, COLLISION_HUMAN, REACH_BANANA]
        .iter()
        .map(|s| s.to_string())
        .collect();

    // Off-grid robot moves end in an absorbing two-state crash cycle.
    let crash = (n, n);
    let label = |c: &Config| {
        let mut l = PropSet::EMPTY;
        if c.robot == crash {
            return l.with(0);
        }
        if blocked(c.robot) {
            l = l.with(0);
        }
        if c.robot == c.human {
            l = l.with(1);
        }
        if bananas.contains(&c.robot) {
            l = l.with(2);
        }
        l
    };

    let start = Config {
        human: cfg.human_start(),
        robot: cfg.robot_start(),
        turn: Player::Environment,
        claims: 0,
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
            _ if c.robot == crash => {
                let next = Config {
                    turn: c.turn.opponent(),
                    ..c
                };
                moves.push((next, cfg.negative_reward));
            }
            Player::Environment => {
                for h in std::iter::once(c.human).chain(cardinal(c.human, n)) {
                    if blocked(h) || (h == c.robot && h != c.human) {
                        continue;
                    }
                    let next = Config {
                        human: h,
                        turn: Player::System,
                        ..c
                    };
                    moves.push((next, distance_cost(cfg.negative_reward, c.robot, h)));
                }
            }
            Player::System => {
                let off_grid = 4 - cardinal(c.robot, n).count();
                if off_grid > 0 {
                    let next = Config {
                        human: crash,
                        robot: crash,
                        turn: Player::Environment,
                        claims: 0,
                    };
                    moves.push((next, cfg.negative_reward));
                }
                // The robot may leave an obstacle cell it crashed into.
                for r in std::iter::once(c.robot).chain(cardinal(c.robot, n)) {
                    let mut claims = c.claims;
                    let mut cost = distance_cost(cfg.negative_reward, r, c.human);
                    if let Some(b) = bananas.iter().position(|&b| b == r) {
                        if claims & 1 << b == 0 {
                            claims |= 1 << b;
                            cost += cfg.positive_reward;
                        }
                    }
                    let next = Config {
                        robot: r,
                        turn: Player::Environment,
                        claims,
                        ..c
                    };
                    moves.push((next, cost));
                }
            }
        }
        for (next, cost) in moves {
            let dst = *index.entry(next).or_insert_with(|| {
                configs.push(next);
                (configs.len() - 1) as StateId
            });
            edges.push(Edge { src, dst, cost });
        }
        i += 1;
    }
    let owners = configs.iter().map(|c| c.turn).collect();
    let labels = configs.iter().map(label).collect();
    let game = QuantGame::new(cfg.k, props, owners, labels, 0, edges)
        .map_err(|e| GenError::InvalidConfig(e.to_string()))?;
    let formula = parse_fragment(GRID_FORMULA).expect("well-formed");
    Ok((game, formula))
}
