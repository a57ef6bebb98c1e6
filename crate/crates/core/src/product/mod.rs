//! Synchronized products of a game with a comparator and/or an objective
//! monitor.
//!
//! One game move `v -> v'` feeds the edge cost to the comparator and the
//! label of `v'` to the objective monitor. Only states reachable from
//! `(v_init, s_I, q_0)` are built, where `q_0` already consumed `L(v_init)`.
//! Product states whose comparator component is the rejecting sink or whose
//! obligation component is `DEAD` are merged into one absorbing losing sink.

mod export;

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::deadline::{Deadline, Timeout};
use crate::ds::{CompState, Comparator, Relation, ACCEPTING_SINK, REJECTING_SINK};
use crate::game::{Player, QuantGame, StateId};
use crate::objective::{LabelMonitor, ObjState, Objective};

pub type ProdState = u32;

/// Game edge index stored on the losing sink's self-loop.
const NO_EDGE: u32 = u32::MAX;

/// Game and automaton components of a product state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Origin {
    pub game: StateId,
    pub comparator: Option<CompState>,
    pub objective: Option<ObjState>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductKind {
    Reachability { target: Vec<bool> },
    /// Max-parity; even colors are good for the system.
    Parity { colors: Vec<u32> },
}

/// Which automaton is synchronized with the game first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProductOrder {
    #[default]
    ComparatorFirst,
    ObjectiveFirst,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("edge {src} -> {dst} has cost {cost} outside the comparator alphabet [-{mu}, {mu}]")]
    AlphabetBound {
        src: StateId,
        dst: StateId,
        cost: i64,
        mu: i64,
    },
    #[error("the system maximizes: comparator relation must be GEQ (negate costs to minimize)")]
    Relation,
    #[error("comparator discount k={comparator} differs from the game's k={game}")]
    DiscountMismatch { game: u32, comparator: u32 },
    #[error("product exceeds 2^32 states")]
    TooLarge,
    #[error("invalid game graph: {0}")]
    InvalidGraph(String),
    #[error(transparent)]
    Timeout(#[from] Timeout),
}

/// An uncosted two-player game with a reachability or parity winning
/// condition for the system.
#[derive(Clone, Debug)]
pub struct ProductGame {
    owners: Vec<Player>,
    offsets: Vec<usize>,
    succ: Vec<ProdState>,
    /// Game edge realizing each product edge (`NO_EDGE` on the sink loop).
    edge_refs: Vec<u32>,
    pred_offsets: Vec<usize>,
    preds: Vec<ProdState>,
    initial: ProdState,
    kind: ProductKind,
    origins: Vec<Option<Origin>>,
    losing_sink: Option<ProdState>,
}

impl ProductGame {
    /// Builds a game directly from an edge list (no origins, no sink). Used
    /// for hand-made and randomly generated solver inputs.
    pub fn from_parts(
        owners: Vec<Player>,
        edges: &[(ProdState, ProdState)],
        initial: ProdState,
        kind: ProductKind,
    ) -> Result<Self, ProductError> {
        let n = owners.len();
        let mut lists: Vec<Vec<(ProdState, u32)>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(ProductError::InvalidGraph(format!(
                    "edge {a} -> {b} refers to a missing state"
                )));
            }
            lists[a as usize].push((b, NO_EDGE));
        }
        if initial as usize >= n {
            return Err(ProductError::InvalidGraph(format!(
                "initial state {initial} does not exist"
            )));
        }
        check_kind_len(&kind, n)?;
        let game = Self::assemble(owners, lists, initial, kind, vec![None; n], None);
        if let Some(u) = (0..n).find(|&u| game.successors(u as ProdState).is_empty()) {
            return Err(ProductError::InvalidGraph(format!("state {u} has no successor")));
        }
        Ok(game)
    }

    fn assemble(
        owners: Vec<Player>,
        mut lists: Vec<Vec<(ProdState, u32)>>,
        initial: ProdState,
        kind: ProductKind,
        origins: Vec<Option<Origin>>,
        losing_sink: Option<ProdState>,
    ) -> Self {
        let n = owners.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut succ = Vec::new();
        let mut edge_refs = Vec::new();
        let mut indegree = vec![0usize; n];
        offsets.push(0);
        for list in &mut lists {
            list.sort_unstable();
            for &(w, e) in list.iter() {
                succ.push(w);
                edge_refs.push(e);
                indegree[w as usize] += 1;
            }
            offsets.push(succ.len());
        }
        let mut pred_offsets = Vec::with_capacity(n + 1);
        pred_offsets.push(0);
        for d in &indegree {
            pred_offsets.push(pred_offsets.last().unwrap() + d);
        }
        let mut fill = pred_offsets.clone();
        let mut preds = vec![0; succ.len()];
        for u in 0..n {
            for &w in &succ[offsets[u]..offsets[u + 1]] {
                preds[fill[w as usize]] = u as ProdState;
                fill[w as usize] += 1;
            }
        }
        ProductGame {
            owners,
            offsets,
            succ,
            edge_refs,
            pred_offsets,
            preds,
            initial,
            kind,
            origins,
            losing_sink,
        }
    }

    pub fn num_states(&self) -> usize {
        self.owners.len()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.len()
    }

    pub fn initial(&self) -> ProdState {
        self.initial
    }

    pub fn owner(&self, u: ProdState) -> Player {
        self.owners[u as usize]
    }

    /// Successors in ascending id order (the losing sink may appear more
    /// than once, once per game edge leading into it).
    pub fn successors(&self, u: ProdState) -> &[ProdState] {
        &self.succ[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }

    pub fn predecessors(&self, u: ProdState) -> &[ProdState] {
        &self.preds[self.pred_offsets[u as usize]..self.pred_offsets[u as usize + 1]]
    }

    /// Index into the game's edge list of the `i`-th outgoing product edge.
    pub fn game_edge(&self, u: ProdState, i: usize) -> Option<usize> {
        match self.edge_refs[self.offsets[u as usize] + i] {
            NO_EDGE => None,
            e => Some(e as usize),
        }
    }

    pub fn kind(&self) -> &ProductKind {
        &self.kind
    }

    pub fn is_target(&self, u: ProdState) -> bool {
        match &self.kind {
            ProductKind::Reachability { target } => target[u as usize],
            ProductKind::Parity { .. } => false,
        }
    }

    pub fn color(&self, u: ProdState) -> Option<u32> {
        match &self.kind {
            ProductKind::Parity { colors } => Some(colors[u as usize]),
            ProductKind::Reachability { .. } => None,
        }
    }

    /// `None` for the losing sink and for games built with `from_parts`.
    pub fn origin(&self, u: ProdState) -> Option<Origin> {
        self.origins[u as usize]
    }

    pub fn losing_sink(&self) -> Option<ProdState> {
        self.losing_sink
    }

    /// Rough heap footprint of the adjacency structure, in bytes.
    pub fn heap_bytes(&self) -> usize {
        use std::mem::size_of;
        let n = self.num_states();
        let m = self.num_edges();
        n * (size_of::<Player>() + 2 * size_of::<usize>() + size_of::<Option<Origin>>() + 4)
            + m * (2 * size_of::<ProdState>() + size_of::<u32>())
    }

    /// Structural invariants: every state has a successor and, for
    /// products, the owner matches the game state's owner.
    pub fn validate(&self, game: Option<&QuantGame>) -> Result<(), String> {
        for u in 0..self.num_states() as ProdState {
            if self.successors(u).is_empty() {
                return Err(format!("product state {u} has no successor"));
            }
            if let (Some(g), Some(o)) = (game, self.origin(u)) {
                if g.owner(o.game) != self.owner(u) {
                    return Err(format!("product state {u} has the wrong owner"));
                }
            }
        }
        Ok(())
    }
}

fn check_kind_len(kind: &ProductKind, n: usize) -> Result<(), ProductError> {
    let len = match kind {
        ProductKind::Reachability { target } => target.len(),
        ProductKind::Parity { colors } => colors.len(),
    };
    if len != n {
        return Err(ProductError::InvalidGraph(format!(
            "winning condition covers {len} states, game has {n}"
        )));
    }
    Ok(())
}

/// Automaton synchronized in one product stage.
#[derive(Clone, Copy)]
enum Stage<'a> {
    Comparator(&'a Comparator),
    Objective(&'a dyn LabelMonitor),
}

/// Intermediate product graph. `None` origins denote the losing sink.
struct Arena {
    origins: Vec<Option<Origin>>,
    succ: Vec<Vec<(ProdState, u32)>>,
    initial: ProdState,
}

impl Arena {
    /// Reachable part of the game itself.
    fn base(g: &QuantGame, deadline: &Deadline) -> Result<Self, ProductError> {
        let mut index = vec![u32::MAX; g.num_states()];
        let mut order = vec![g.initial()];
        index[g.initial() as usize] = 0;
        let mut succ = Vec::new();
        let mut i = 0;
        while i < order.len() {
            if i % 4096 == 0 {
                deadline.check()?;
            }
            let v = order[i];
            let first = g.edge_offset(v);
            let mut list = Vec::with_capacity(g.successors(v).len());
            for (j, e) in g.successors(v).iter().enumerate() {
                if index[e.dst as usize] == u32::MAX {
                    index[e.dst as usize] = order.len() as u32;
                    order.push(e.dst);
                }
                list.push((index[e.dst as usize], (first + j) as u32));
            }
            succ.push(list);
            i += 1;
        }
        Ok(Arena {
            origins: order
                .into_iter()
                .map(|v| {
                    Some(Origin {
                        game: v,
                        comparator: None,
                        objective: None,
                    })
                })
                .collect(),
            succ,
            initial: 0,
        })
    }

    /// Product of this arena with one more automaton.
    fn sync(&self, g: &QuantGame, stage: Stage<'_>, deadline: &Deadline) -> Result<Self, ProductError> {
        let step = |a: u32, edge: u32| -> Option<u32> {
            let e = &g.edges()[edge as usize];
            match stage {
                Stage::Comparator(c) => Some(c.step(a, e.cost)).filter(|&s| s != REJECTING_SINK),
                Stage::Objective(m) => Some(m.step(a, g.label(e.dst))).filter(|&q| !m.is_dead(q)),
            }
        };
        let start = match self.origins[self.initial as usize] {
            None => None,
            Some(o) => match stage {
                Stage::Comparator(c) => Some(c.initial()),
                Stage::Objective(m) => {
                    Some(m.initial(g.label(o.game))).filter(|&q| !m.is_dead(q))
                }
            },
        };

        let mut origins: Vec<Option<Origin>> = Vec::new();
        let mut keys: Vec<(ProdState, u32)> = Vec::new();
        let mut index: HashMap<(ProdState, u32), ProdState> = HashMap::new();
        let mut sink: Option<ProdState> = None;
        let mut succ: Vec<Vec<(ProdState, u32)>> = Vec::new();

        let mut intern = |old: ProdState,
                          a: Option<u32>,
                          origins: &mut Vec<Option<Origin>>,
                          keys: &mut Vec<(ProdState, u32)>|
         -> Result<ProdState, ProductError> {
            let key = match (self.origins[old as usize], a) {
                (Some(_), Some(a)) => (old, a),
                _ => {
                    if let Some(s) = sink {
                        return Ok(s);
                    }
                    (u32::MAX, u32::MAX)
                }
            };
            if key.0 != u32::MAX {
                if let Some(&id) = index.get(&key) {
                    return Ok(id);
                }
            }
            let id = ProdState::try_from(origins.len()).map_err(|_| ProductError::TooLarge)?;
            if key.0 == u32::MAX {
                sink = Some(id);
                origins.push(None);
            } else {
                index.insert(key, id);
                let mut o = self.origins[old as usize].expect("non-sink");
                match stage {
                    Stage::Comparator(_) => o.comparator = Some(key.1),
                    Stage::Objective(_) => o.objective = Some(key.1),
                }
                origins.push(Some(o));
            }
            keys.push(key);
            Ok(id)
        };

        let initial = intern(self.initial, start, &mut origins, &mut keys)?;
        let mut queue = VecDeque::from([initial]);
        while let Some(id) = queue.pop_front() {
            if id % 4096 == 0 {
                deadline.check()?;
            }
            let (old, a) = keys[id as usize];
            if succ.len() <= id as usize {
                succ.resize(id as usize + 1, Vec::new());
            }
            if old == u32::MAX {
                succ[id as usize] = vec![(id, NO_EDGE)];
                continue;
            }
            let mut list = Vec::with_capacity(self.succ[old as usize].len());
            for &(w, edge) in &self.succ[old as usize] {
                let a2 = if self.origins[w as usize].is_some() {
                    step(a, edge)
                } else {
                    None
                };
                let before = origins.len();
                let target = intern(w, a2, &mut origins, &mut keys)?;
                if origins.len() > before {
                    queue.push_back(target);
                }
                list.push((target, edge));
            }
            succ[id as usize] = list;
        }
        succ.resize(origins.len(), Vec::new());
        Ok(Arena {
            origins,
            succ,
            initial,
        })
    }

    fn losing_sink(&self) -> Option<ProdState> {
        self.origins
            .iter()
            .position(Option::is_none)
            .map(|i| i as ProdState)
    }

    fn finish(self, g: &QuantGame, kind: impl Fn(Option<Origin>) -> Cond) -> ProductGame {
        let sink = self.losing_sink();
        let owners = self
            .origins
            .iter()
            .map(|o| o.map_or(Player::Environment, |o| g.owner(o.game)))
            .collect();
        let conds: Vec<Cond> = self.origins.iter().map(|&o| kind(o)).collect();
        let kind = if conds.iter().all(|c| matches!(c, Cond::Target(_))) {
            ProductKind::Reachability {
                target: conds.iter().map(|c| matches!(c, Cond::Target(true))).collect(),
            }
        } else {
            ProductKind::Parity {
                colors: conds
                    .iter()
                    .map(|c| match c {
                        Cond::Color(c) => *c,
                        Cond::Target(_) => unreachable!("mixed winning condition"),
                    })
                    .collect(),
            }
        };
        ProductGame::assemble(owners, self.succ, self.initial, kind, self.origins, sink)
    }
}

enum Cond {
    Target(bool),
    Color(u32),
}

fn check_comparator(g: &QuantGame, c: &Comparator) -> Result<(), ProductError> {
    if c.relation() != Relation::Geq {
        return Err(ProductError::Relation);
    }
    if c.params().k() != g.k() {
        return Err(ProductError::DiscountMismatch {
            game: g.k(),
            comparator: c.params().k(),
        });
    }
    if let Some(e) = g.edges().iter().find(|e| e.cost.abs() > c.mu()) {
        return Err(ProductError::AlphabetBound {
            src: e.src,
            dst: e.dst,
            cost: e.cost,
            mu: c.mu(),
        });
    }
    Ok(())
}

/// Smallest odd color dominating every DPA color.
pub fn dominating_odd(max_color: u32) -> u32 {
    max_color | 1
}

/// `g ⊗ c`: a reachability game whose target is the comparator's accepting
/// sink.
pub fn reach_product(
    g: &QuantGame,
    c: &Comparator,
    deadline: &Deadline,
) -> Result<ProductGame, ProductError> {
    check_comparator(g, c)?;
    let arena = Arena::base(g, deadline)?.sync(g, Stage::Comparator(c), deadline)?;
    Ok(arena.finish(g, |o| {
        Cond::Target(o.is_some_and(|o| o.comparator == Some(ACCEPTING_SINK)))
    }))
}

/// `g ⊗ c ⊗ obj`. A fragment objective yields a reachability game with
/// target `s = accepting sink ∧ q = full`; a DPA yields a parity game in
/// which every state outside the accepting sink carries the dominating odd
/// color.
pub fn full_product(
    g: &QuantGame,
    c: &Comparator,
    obj: &Objective,
    order: ProductOrder,
    deadline: &Deadline,
) -> Result<ProductGame, ProductError> {
    check_comparator(g, c)?;
    let base = Arena::base(g, deadline)?;
    let (first, second) = match order {
        ProductOrder::ComparatorFirst => (Stage::Comparator(c), Stage::Objective(obj.monitor())),
        ProductOrder::ObjectiveFirst => (Stage::Objective(obj.monitor()), Stage::Comparator(c)),
    };
    let arena = base.sync(g, first, deadline)?.sync(g, second, deadline)?;
    Ok(match obj {
        Objective::Fragment(a) => {
            let full = a.full();
            arena.finish(g, |o| {
                Cond::Target(o.is_some_and(|o| {
                    o.comparator == Some(ACCEPTING_SINK) && o.objective == Some(full)
                }))
            })
        }
        Objective::Parity(a) => {
            let odd = dominating_odd(a.max_color());
            arena.finish(g, |o| match o {
                Some(o) if o.comparator == Some(ACCEPTING_SINK) => {
                    Cond::Color(a.color(o.objective.expect("synchronized")))
                }
                _ => Cond::Color(odd),
            })
        }
    })
}

/// `g ⊗ obj` without the quantitative objective.
pub fn objective_product(
    g: &QuantGame,
    obj: &Objective,
    deadline: &Deadline,
) -> Result<ProductGame, ProductError> {
    let arena = Arena::base(g, deadline)?.sync(g, Stage::Objective(obj.monitor()), deadline)?;
    Ok(match obj {
        Objective::Fragment(a) => {
            let full = a.full();
            arena.finish(g, |o| {
                Cond::Target(o.is_some_and(|o| o.objective == Some(full)))
            })
        }
        Objective::Parity(a) => {
            let odd = dominating_odd(a.max_color());
            arena.finish(g, |o| match o {
                Some(o) => Cond::Color(a.color(o.objective.expect("synchronized"))),
                None => Cond::Color(odd),
            })
        }
    })
}
