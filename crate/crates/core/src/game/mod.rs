//! Labelled quantitative turn-based games, plays and their cost / label
//! sequences.

mod format;

pub use format::GameFile;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lasso::Lasso;

/// Dense state id.
pub type StateId = u32;

/// A play `prefix · cycle^ω` of game states.
pub type LassoPlay = Lasso<StateId>;

/// Maximum size of a proposition universe (labels are `u64` bitsets).
pub const MAX_PROPOSITIONS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "SYSTEM")]
    System,
    #[serde(rename = "ENVIRONMENT")]
    Environment,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::System => Player::Environment,
            Player::Environment => Player::System,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::System => "SYSTEM",
            Player::Environment => "ENVIRONMENT",
        })
    }
}

impl FromStr for Player {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SYSTEM" => Ok(Player::System),
            "ENVIRONMENT" => Ok(Player::Environment),
            other => Err(format!("unknown owner `{other}` (expected SYSTEM or ENVIRONMENT)")),
        }
    }
}

/// Set of propositions, as a bitset over an ordered universe.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropSet(pub u64);

impl PropSet {
    pub const EMPTY: PropSet = PropSet(0);

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 >> index & 1 == 1
    }

    pub fn with(self, index: usize) -> PropSet {
        PropSet(self.0 | 1 << index)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: StateId,
    pub dst: StateId,
    pub cost: i64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid JSON game: {0}")]
    Json(String),
    #[error("edge {src} -> {dst} refers to a missing state")]
    DanglingEdge { src: StateId, dst: StateId },
    #[error("initial state {0} does not exist")]
    MissingInitial(StateId),
    #[error("at most {MAX_PROPOSITIONS} propositions are supported, got {0}")]
    TooManyPropositions(usize),
    #[error("duplicate proposition `{0}`")]
    DuplicateProposition(String),
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("discount parameter k must be positive")]
    InvalidK,
    #[error("invalid play: {0}")]
    InvalidPlay(String),
}

/// One invariant violation reported by [`QuantGame::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoSuccessor { state: StateId },
    CostExceedsBound { src: StateId, dst: StateId, cost: i64, mu: i64 },
    ParallelEdges { src: StateId, dst: StateId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSuccessor { state } => write!(f, "state {state} has no successor"),
            Violation::CostExceedsBound { src, dst, cost, mu } => {
                write!(f, "edge {src} -> {dst} has cost {cost} outside [-{mu}, {mu}]")
            }
            Violation::ParallelEdges { src, dst } => {
                write!(f, "more than one edge {src} -> {dst}")
            }
        }
    }
}

/// Quantitative graph game `(V = V_sys ⊎ V_env, v_init, E, cost, labels, k)`.
///
/// Edges are stored sorted by `(src, dst)` in a compressed adjacency layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantGame {
    k: u32,
    declared_mu: Option<i64>,
    propositions: Vec<String>,
    owners: Vec<Player>,
    labels: Vec<PropSet>,
    initial: StateId,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
}

impl QuantGame {
    /// Builds a game, checking structure only (ids, propositions). Semantic
    /// invariants are reported by [`QuantGame::validate`].
    pub fn new(
        k: u32,
        propositions: Vec<String>,
        owners: Vec<Player>,
        labels: Vec<PropSet>,
        initial: StateId,
        mut edges: Vec<Edge>,
    ) -> Result<Self, GameError> {
        if k == 0 {
            return Err(GameError::InvalidK);
        }
        if propositions.len() > MAX_PROPOSITIONS {
            return Err(GameError::TooManyPropositions(propositions.len()));
        }
        for (i, p) in propositions.iter().enumerate() {
            if propositions[..i].contains(p) {
                return Err(GameError::DuplicateProposition(p.clone()));
            }
        }
        assert_eq!(owners.len(), labels.len(), "one label per state");
        let n = owners.len();
        if initial as usize >= n {
            return Err(GameError::MissingInitial(initial));
        }
        let universe = if propositions.len() == 64 {
            u64::MAX
        } else {
            (1u64 << propositions.len()) - 1
        };
        if let Some(extra) = labels.iter().find(|l| l.0 & !universe != 0) {
            return Err(GameError::UnknownProposition(format!(
                "bit {}",
                63 - (extra.0 & !universe).leading_zeros()
            )));
        }
        if let Some(e) = edges
            .iter()
            .find(|e| e.src as usize >= n || e.dst as usize >= n)
        {
            return Err(GameError::DanglingEdge {
                src: e.src,
                dst: e.dst,
            });
        }
        edges.sort_by_key(|e| (e.src, e.dst, e.cost));
        let mut offsets = vec![0usize; n + 1];
        for e in &edges {
            offsets[e.src as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok(QuantGame {
            k,
            declared_mu: None,
            propositions,
            owners,
            labels,
            initial,
            edges,
            offsets,
        })
    }

    /// Declares an explicit weight bound that [`QuantGame::validate`] checks.
    pub fn with_declared_mu(mut self, mu: i64) -> Self {
        self.declared_mu = Some(mu);
        self
    }

    /// Replaces the discount parameter; `k` is checked when the comparator is
    /// built.
    pub fn with_k(mut self, k: u32) -> Self {
        self.k = k;
        self
    }

    pub fn declared_mu(&self) -> Option<i64> {
        self.declared_mu
    }

    /// Discount parameter `k` of `d = 1 + 2^-k`.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn num_states(&self) -> usize {
        self.owners.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn owner(&self, v: StateId) -> Player {
        self.owners[v as usize]
    }

    pub fn label(&self, v: StateId) -> PropSet {
        self.labels[v as usize]
    }

    pub fn propositions(&self) -> &[String] {
        &self.propositions
    }

    pub fn proposition_index(&self, name: &str) -> Option<usize> {
        self.propositions.iter().position(|p| p == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Outgoing edges of `v`, sorted by destination.
    pub fn successors(&self, v: StateId) -> &[Edge] {
        &self.edges[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    /// Index of the first edge leaving `v` in [`QuantGame::edges`].
    pub fn edge_offset(&self, v: StateId) -> usize {
        self.offsets[v as usize]
    }

    pub fn edge_cost(&self, src: StateId, dst: StateId) -> Option<i64> {
        let succ = self.successors(src);
        succ.binary_search_by_key(&dst, |e| e.dst)
            .ok()
            .map(|i| succ[i].cost)
    }

    /// Largest absolute edge cost.
    pub fn max_abs_cost(&self) -> i64 {
        self.edges.iter().map(|e| e.cost.abs()).max().unwrap_or(0)
    }

    /// Weight bound used for comparators: the declared bound if any, else the
    /// largest absolute cost, and at least 1.
    pub fn mu(&self) -> i64 {
        self.declared_mu.unwrap_or_else(|| self.max_abs_cost()).max(1)
    }

    /// Every invariant violation, each naming the offending state or edge.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for v in 0..self.num_states() as StateId {
            let succ = self.successors(v);
            if succ.is_empty() {
                out.push(Violation::NoSuccessor { state: v });
            }
            for pair in succ.windows(2) {
                if pair[0].dst == pair[1].dst {
                    out.push(Violation::ParallelEdges {
                        src: v,
                        dst: pair[0].dst,
                    });
                }
            }
        }
        if let Some(mu) = self.declared_mu {
            for e in &self.edges {
                if e.cost.abs() > mu {
                    out.push(Violation::CostExceedsBound {
                        src: e.src,
                        dst: e.dst,
                        cost: e.cost,
                        mu,
                    });
                }
            }
        }
        out
    }

    /// Checks that `play` starts at the initial state and follows edges,
    /// including the junction into the cycle and the cycle wrap.
    pub fn check_play(&self, play: &LassoPlay) -> Result<(), GameError> {
        if play.cycle.is_empty() {
            return Err(GameError::InvalidPlay("empty cycle".into()));
        }
        if let Some(&bad) = play.support().find(|&&v| v as usize >= self.num_states()) {
            return Err(GameError::InvalidPlay(format!("unknown state {bad}")));
        }
        if *play.get(0) != self.initial {
            return Err(GameError::InvalidPlay(format!(
                "play starts at {} instead of the initial state {}",
                play.get(0),
                self.initial
            )));
        }
        for i in 0..play.period_positions() {
            let (src, dst) = (*play.get(i), *play.get(i + 1));
            if self.edge_cost(src, dst).is_none() {
                return Err(GameError::InvalidPlay(format!("{src} -> {dst} is not an edge")));
            }
        }
        Ok(())
    }

    /// Cost sequence of a play: letter `i` is the cost of the edge leaving
    /// position `i`. Prefix and cycle lengths equal those of the play.
    pub fn cost_sequence(&self, play: &LassoPlay) -> Result<Lasso<i64>, GameError> {
        self.check_play(play)?;
        let cost_at = |i: usize| {
            self.edge_cost(*play.get(i), *play.get(i + 1))
                .expect("checked above")
        };
        let m = play.prefix.len();
        Ok(Lasso {
            prefix: (0..m).map(cost_at).collect(),
            cycle: (m..m + play.cycle.len()).map(cost_at).collect(),
        })
    }

    /// Label sequence `L(v0) L(v1) …` of a play.
    pub fn label_sequence(&self, play: &LassoPlay) -> Result<Lasso<PropSet>, GameError> {
        self.check_play(play)?;
        Ok(play.map(|&v| self.label(v)))
    }

    /// Names of the propositions in `set`.
    pub fn label_names(&self, set: PropSet) -> Vec<&str> {
        set.iter()
            .filter_map(|i| self.propositions.get(i).map(String::as_str))
            .collect()
    }
}
