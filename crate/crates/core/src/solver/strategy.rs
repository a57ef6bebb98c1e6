//! Finite-memory strategies on quantitative games: lifting from product
//! strategies, random memoryless strategies, text format and simulation.
//!
//! ```text
//! strategy v1
//! player SYSTEM
//! memory 2
//! memstate 0 s=0@0,q=1
//! memstate 1 sink
//! initial 0
//! move 3 0 4                # at game state 3 with memory 0, go to 4
//! mem 0 3:4 1               # memory 0 observing the move 3 -> 4 becomes 1
//! ```
//!
//! The memory is updated after every move of either player. A missing
//! `move` entry defaults to the lowest-id successor; a missing `mem` entry
//! keeps the memory unchanged.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::SolveResult;
use crate::game::{LassoPlay, Player, QuantGame, StateId};
use crate::lasso::Lasso;
use crate::product::{ProdState, ProductGame};

pub type MemState = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMemoryStrategy {
    player: Player,
    memory_labels: Vec<String>,
    initial_memory: MemState,
    moves: BTreeMap<(StateId, MemState), StateId>,
    updates: BTreeMap<(MemState, StateId, StateId), MemState>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("strategy undefined on product state {0} of its winning region")]
    Undefined(ProdState),
    #[error("product state {0} has no game origin")]
    NoOrigin(ProdState),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimulationError {
    #[error("{player} strategy moves from {src} to {dst}, which is not a successor")]
    NotASuccessor {
        player: Player,
        src: StateId,
        dst: StateId,
    },
    #[error("strategy for {0} used for the wrong player")]
    WrongPlayer(Player),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("strategy line {line}: {message}")]
pub struct StrategyFormatError {
    pub line: usize,
    pub message: String,
}

impl FiniteMemoryStrategy {
    /// A memoryless strategy given as an explicit move table.
    pub fn memoryless(player: Player, moves: impl IntoIterator<Item = (StateId, StateId)>) -> Self {
        FiniteMemoryStrategy {
            player,
            memory_labels: vec!["m0".to_string()],
            initial_memory: 0,
            moves: moves.into_iter().map(|(v, w)| ((v, 0), w)).collect(),
            updates: BTreeMap::new(),
        }
    }

    /// Memoryless strategy picking a uniformly random successor at every
    /// state owned by `player`; reproducible per seed.
    pub fn random_memoryless(g: &QuantGame, player: Player, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let moves = (0..g.num_states() as StateId)
            .filter(|&v| g.owner(v) == player && !g.successors(v).is_empty())
            .map(|v| {
                let succ = g.successors(v);
                (v, succ[rng.gen_range(0..succ.len())].dst)
            })
            .collect::<Vec<_>>();
        Self::memoryless(player, moves)
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn memory_size(&self) -> usize {
        self.memory_labels.len()
    }

    pub fn memory_label(&self, m: MemState) -> &str {
        &self.memory_labels[m as usize]
    }

    pub fn initial_memory(&self) -> MemState {
        self.initial_memory
    }

    pub fn num_moves(&self) -> usize {
        self.moves.len()
    }

    /// Chosen successor at `v` with memory `m`.
    pub fn next(&self, g: &QuantGame, v: StateId, m: MemState) -> StateId {
        self.moves
            .get(&(v, m))
            .copied()
            .unwrap_or_else(|| g.successors(v)[0].dst)
    }

    /// Memory after observing the move `src -> dst`.
    pub fn update(&self, m: MemState, src: StateId, dst: StateId) -> MemState {
        self.updates.get(&(m, src, dst)).copied().unwrap_or(m)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("strategy v1\n");
        let _ = writeln!(out, "player {}", self.player);
        let _ = writeln!(out, "memory {}", self.memory_labels.len());
        for (m, label) in self.memory_labels.iter().enumerate() {
            let _ = writeln!(out, "memstate {m} {label}");
        }
        let _ = writeln!(out, "initial {}", self.initial_memory);
        for (&(v, m), w) in &self.moves {
            let _ = writeln!(out, "move {v} {m} {w}");
        }
        for (&(m, src, dst), m2) in &self.updates {
            let _ = writeln!(out, "mem {m} {src}:{dst} {m2}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, StrategyFormatError> {
        let mut player = None;
        let mut memory: Option<usize> = None;
        let mut labels: BTreeMap<usize, String> = BTreeMap::new();
        let mut initial = 0;
        let mut moves = BTreeMap::new();
        let mut updates = BTreeMap::new();
        let mut header = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| StrategyFormatError { line, message };
            if !header {
                if trimmed != "strategy v1" {
                    return Err(err("expected header `strategy v1`".into()));
                }
                header = true;
                continue;
            }
            let f: Vec<&str> = trimmed.split_whitespace().collect();
            let num = |i: usize| -> Result<u32, StrategyFormatError> {
                f.get(i)
                    .ok_or_else(|| err(format!("missing field {i}")))?
                    .parse::<u32>()
                    .map_err(|_| err(format!("invalid number `{}`", f[i])))
            };
            match f[0] {
                "player" => {
                    player = Some(
                        f.get(1)
                            .ok_or_else(|| err("missing player".into()))?
                            .parse::<Player>()
                            .map_err(err)?,
                    )
                }
                "memory" => memory = Some(num(1)? as usize),
                "memstate" => {
                    labels.insert(num(1)? as usize, f[2..].join(" "));
                }
                "initial" => initial = num(1)?,
                "move" => {
                    moves.insert((num(1)?, num(2)?), num(3)?);
                }
                "mem" => {
                    let obs = f.get(2).ok_or_else(|| err("missing observation".into()))?;
                    let (a, b) = obs
                        .split_once(':')
                        .ok_or_else(|| err(format!("observation `{obs}` is not `src:dst`")))?;
                    let parse = |s: &str| {
                        s.parse::<u32>()
                            .map_err(|_| err(format!("invalid state `{s}`")))
                    };
                    updates.insert((num(1)?, parse(a)?, parse(b)?), num(3)?);
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let last = text.lines().count().max(1);
        let err = |message: &str| StrategyFormatError {
            line: last,
            message: message.to_string(),
        };
        if !header {
            return Err(err("missing header `strategy v1`"));
        }
        let player = player.ok_or_else(|| err("missing `player` line"))?;
        let size = memory.unwrap_or(labels.len().max(1));
        let memory_labels: Vec<String> = (0..size)
            .map(|m| labels.get(&m).cloned().unwrap_or_else(|| format!("m{m}")))
            .collect();
        let in_range = |m: MemState| (m as usize) < size;
        if !in_range(initial)
            || moves.keys().any(|&(_, m)| !in_range(m))
            || updates
                .iter()
                .any(|(&(m, _, _), &m2)| !in_range(m) || !in_range(m2))
        {
            return Err(err("memory state out of range"));
        }
        Ok(FiniteMemoryStrategy {
            player,
            memory_labels,
            initial_memory: initial,
            moves,
            updates,
        })
    }
}

/// Turns a memoryless product strategy of `player` into a finite-memory
/// strategy on the game. Memory states are the automaton components
/// `(s, q)` occurring in the product, plus one memory for the losing sink.
pub fn lift_strategy(
    pg: &ProductGame,
    g: &QuantGame,
    result: &SolveResult,
    player: Player,
) -> Result<FiniteMemoryStrategy, LiftError> {
    let strategy = result.strategy(player);
    let mut memory_of: HashMap<(Option<u32>, Option<u32>), MemState> = HashMap::new();
    let mut memory_labels = Vec::new();
    let mut mem = vec![0 as MemState; pg.num_states()];
    for u in 0..pg.num_states() as ProdState {
        let key = match pg.origin(u) {
            Some(o) => (o.comparator, o.objective),
            None if pg.losing_sink() == Some(u) => (Some(u32::MAX), Some(u32::MAX)),
            None => return Err(LiftError::NoOrigin(u)),
        };
        mem[u as usize] = *memory_of.entry(key).or_insert_with(|| {
            memory_labels.push(match key {
                (Some(u32::MAX), Some(u32::MAX)) => "sink".to_string(),
                (s, q) => format!(
                    "s={},q={}",
                    s.map_or("-".into(), |s| s.to_string()),
                    q.map_or("-".into(), |q| q.to_string())
                ),
            });
            memory_labels.len() as MemState - 1
        });
    }
    let region = result.region(player);
    let mut moves = BTreeMap::new();
    let mut updates = BTreeMap::new();
    for u in 0..pg.num_states() as ProdState {
        let Some(o) = pg.origin(u) else { continue };
        let m = mem[u as usize];
        if pg.owner(u) == player && region[u as usize] {
            let w = strategy[u as usize].ok_or(LiftError::Undefined(u))?;
            let i = pg
                .successors(u)
                .iter()
                .position(|&x| x == w)
                .expect("strategy picks a successor");
            let e = pg.game_edge(u, i).expect("non-sink edge");
            moves.insert((o.game, m), g.edges()[e].dst);
        }
        for (i, &w) in pg.successors(u).iter().enumerate() {
            let e = &g.edges()[pg.game_edge(u, i).expect("non-sink edge")];
            let m2 = mem[w as usize];
            if m2 != m {
                updates.insert((m, e.src, e.dst), m2);
            }
        }
    }
    Ok(FiniteMemoryStrategy {
        player,
        memory_labels,
        initial_memory: mem[pg.initial() as usize],
        moves,
        updates,
    })
}

/// Plays `sys` against `env` from the initial state. The configuration
/// (state, both memories) eventually repeats; the exact lasso is returned.
pub fn simulate(
    g: &QuantGame,
    sys: &FiniteMemoryStrategy,
    env: &FiniteMemoryStrategy,
) -> Result<LassoPlay, SimulationError> {
    if sys.player != Player::System {
        return Err(SimulationError::WrongPlayer(sys.player));
    }
    if env.player != Player::Environment {
        return Err(SimulationError::WrongPlayer(env.player));
    }
    let mut seen: HashMap<(StateId, MemState, MemState), usize> = HashMap::new();
    let mut states = Vec::new();
    let (mut v, mut ms, mut me) = (g.initial(), sys.initial_memory, env.initial_memory);
    loop {
        if let Some(&start) = seen.get(&(v, ms, me)) {
            let cycle = states.split_off(start);
            return Ok(Lasso::new(states, cycle));
        }
        seen.insert((v, ms, me), states.len());
        states.push(v);
        let owner = g.owner(v);
        let w = match owner {
            Player::System => sys.next(g, v, ms),
            Player::Environment => env.next(g, v, me),
        };
        if g.edge_cost(v, w).is_none() {
            return Err(SimulationError::NotASuccessor {
                player: owner,
                src: v,
                dst: w,
            });
        }
        ms = sys.update(ms, v, w);
        me = env.update(me, v, w);
        v = w;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Edge, PropSet};

    fn two_cycle() -> QuantGame {
        QuantGame::new(
            1,
            vec![],
            vec![Player::System, Player::Environment],
            vec![PropSet::EMPTY; 2],
            0,
            vec![
                Edge { src: 0, dst: 1, cost: 1 },
                Edge { src: 1, dst: 0, cost: 0 },
                Edge { src: 1, dst: 1, cost: 0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn constant_strategies_on_two_cycle() {
        let g = two_cycle();
        let sys = FiniteMemoryStrategy::memoryless(Player::System, [(0, 1)]);
        let env = FiniteMemoryStrategy::memoryless(Player::Environment, [(1, 0)]);
        let play = simulate(&g, &sys, &env).unwrap();
        assert!(play.prefix.is_empty());
        assert_eq!(play.cycle, vec![0, 1]);
    }

    #[test]
    fn non_successor_is_an_error() {
        let g = two_cycle();
        let sys = FiniteMemoryStrategy::memoryless(Player::System, [(0, 0)]);
        let env = FiniteMemoryStrategy::memoryless(Player::Environment, []);
        assert!(matches!(
            simulate(&g, &sys, &env),
            Err(SimulationError::NotASuccessor { src: 0, dst: 0, .. })
        ));
    }

    #[test]
    fn random_strategy_is_reproducible() {
        let g = two_cycle();
        for seed in 0..10 {
            assert_eq!(
                FiniteMemoryStrategy::random_memoryless(&g, Player::Environment, seed),
                FiniteMemoryStrategy::random_memoryless(&g, Player::Environment, seed)
            );
        }
    }

    #[test]
    fn memory_counts_moves() {
        // Environment stays at 1 once, then returns: memory 0 -> 1 on 1:1.
        let g = two_cycle();
        let mut env = FiniteMemoryStrategy::memoryless(Player::Environment, [(1, 1)]);
        env.memory_labels.push("stayed".into());
        env.moves.insert((1, 1), 0);
        env.updates.insert((0, 1, 1), 1);
        let sys = FiniteMemoryStrategy::memoryless(Player::System, [(0, 1)]);
        let play = simulate(&g, &sys, &env).unwrap();
        assert_eq!(play.prefix, vec![0, 1]);
        assert_eq!(play.cycle, vec![1, 0]);
        let text = env.to_text();
        assert!(text.contains("mem 0 1:1 1"));
        assert_eq!(FiniteMemoryStrategy::from_text(&text).unwrap(), env);
    }

    #[test]
    fn format_errors_have_lines() {
        let e = FiniteMemoryStrategy::from_text("strategy v1\nplayer SYSTEM\nmove 1 x 2\n")
            .unwrap_err();
        assert_eq!(e.line, 3);
    }
}
