//! `quantgame v1` text format and its JSON mirror.
//!
//! ```text
//! quantgame v1
//! k 2
//! propositions goal hazard
//! state 0 ENVIRONMENT
//! state 1 SYSTEM goal
//! init 0
//! edge 0 1 -1
//! edge 1 0 3
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. An optional `mu <int>`
//! line declares a weight bound.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Edge, GameError, Player, PropSet, QuantGame, StateId};

const HEADER: &str = "quantgame v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameFile {
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<i64>,
    pub propositions: Vec<String>,
    pub states: Vec<StateRecord>,
    pub init: StateId,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRecord {
    pub id: StateId,
    pub owner: Player,
    #[serde(default)]
    pub labels: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub src: StateId,
    pub dst: StateId,
    pub cost: i64,
}

impl GameFile {
    pub fn from_game(g: &QuantGame) -> Self {
        GameFile {
            k: g.k(),
            mu: g.declared_mu(),
            propositions: g.propositions().to_vec(),
            states: (0..g.num_states() as StateId)
                .map(|v| StateRecord {
                    id: v,
                    owner: g.owner(v),
                    labels: g.label_names(g.label(v)).into_iter().map(String::from).collect(),
                })
                .collect(),
            init: g.initial(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    src: e.src,
                    dst: e.dst,
                    cost: e.cost,
                })
                .collect(),
        }
    }

    /// Resolves names and ids into a [`QuantGame`]. `line_of` maps a state id
    /// or edge index to a source line for error messages (text input only).
    fn into_game(self, lines: Option<&SourceLines>) -> Result<QuantGame, GameError> {
        let err = |line: Option<usize>, message: String| match line {
            Some(line) => GameError::Parse { line, message },
            None => GameError::Json(message),
        };
        let index: HashMap<&str, usize> = self
            .propositions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        let n = self.states.len();
        let mut owners = vec![None; n];
        let mut labels = vec![PropSet::EMPTY; n];
        for (i, s) in self.states.iter().enumerate() {
            let line = lines.map(|l| l.states[i]);
            if s.id as usize >= n {
                return Err(err(
                    line,
                    format!("state id {} is not in 0..{} (ids must be dense)", s.id, n),
                ));
            }
            if owners[s.id as usize].is_some() {
                return Err(err(line, format!("duplicate state id {}", s.id)));
            }
            owners[s.id as usize] = Some(s.owner);
            let mut set = PropSet::EMPTY;
            for name in &s.labels {
                let bit = *index
                    .get(name.as_str())
                    .ok_or_else(|| err(line, format!("unknown proposition `{name}`")))?;
                set = set.with(bit);
            }
            labels[s.id as usize] = set;
        }
        let owners: Vec<Player> = owners.into_iter().map(|o| o.expect("dense ids")).collect();
        if self.init as usize >= n {
            return Err(err(
                lines.and_then(|l| l.init),
                format!("initial state {} does not exist", self.init),
            ));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.src as usize >= n || e.dst as usize >= n {
                return Err(err(
                    lines.map(|l| l.edges[i]),
                    format!("edge {} -> {} refers to a missing state", e.src, e.dst),
                ));
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                src: e.src,
                dst: e.dst,
                cost: e.cost,
            })
            .collect();
        let game = QuantGame::new(self.k, self.propositions, owners, labels, self.init, edges)?;
        Ok(match self.mu {
            Some(mu) => game.with_declared_mu(mu),
            None => game,
        })
    }
}

#[derive(Default)]
struct SourceLines {
    states: Vec<usize>,
    edges: Vec<usize>,
    init: Option<usize>,
}

impl QuantGame {
    pub fn from_text(text: &str) -> Result<Self, GameError> {
        let mut lines = SourceLines::default();
        let mut header_seen = false;
        let mut k = None;
        let mut mu = None;
        let mut propositions: Option<Vec<String>> = None;
        let mut states = Vec::new();
        let mut init = None;
        let mut edges = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |message: String| GameError::Parse {
                line: line_no,
                message,
            };
            if !header_seen {
                if line != HEADER {
                    return Err(perr(format!("expected header `{HEADER}`")));
                }
                header_seen = true;
                continue;
            }
            let mut fields = line.split_whitespace();
            let keyword = fields.next().expect("nonempty line");
            let rest: Vec<&str> = fields.collect();
            let int_field = |i: usize, what: &str| -> Result<i64, GameError> {
                rest.get(i)
                    .ok_or_else(|| perr(format!("missing {what}")))?
                    .parse::<i64>()
                    .map_err(|_| perr(format!("invalid {what} `{}`", rest[i])))
            };
            let id_field = |i: usize, what: &str| -> Result<StateId, GameError> {
                let v = int_field(i, what)?;
                StateId::try_from(v).map_err(|_| perr(format!("invalid {what} `{v}`")))
            };
            match keyword {
                "k" => {
                    let v = int_field(0, "k")?;
                    if v <= 0 || v > 16 {
                        return Err(perr(format!("k must be in 1..=16, got {v}")));
                    }
                    k = Some(v as u32);
                }
                "mu" => mu = Some(int_field(0, "mu")?),
                "propositions" => {
                    if propositions.is_some() {
                        return Err(perr("duplicate propositions line".into()));
                    }
                    let names: Vec<String> = rest.iter().map(|s| s.to_string()).collect();
                    for (i, n) in names.iter().enumerate() {
                        if names[..i].contains(n) {
                            return Err(perr(format!("duplicate proposition `{n}`")));
                        }
                    }
                    propositions = Some(names);
                }
                "state" => {
                    let id = id_field(0, "state id")?;
                    let owner = rest
                        .get(1)
                        .ok_or_else(|| perr("missing owner".into()))?
                        .parse::<Player>()
                        .map_err(perr)?;
                    let universe = propositions.as_deref().unwrap_or(&[]);
                    for name in &rest[2..] {
                        if !universe.iter().any(|p| p == name) {
                            return Err(perr(format!("unknown proposition `{name}`")));
                        }
                    }
                    lines.states.push(line_no);
                    states.push(super::format::StateRecord {
                        id,
                        owner,
                        labels: rest[2..].iter().map(|s| s.to_string()).collect(),
                    });
                }
                "init" => {
                    init = Some(id_field(0, "initial state")?);
                    lines.init = Some(line_no);
                }
                "edge" => {
                    let src = id_field(0, "edge source")?;
                    let dst = id_field(1, "edge target")?;
                    let cost = int_field(2, "edge cost")?;
                    lines.edges.push(line_no);
                    edges.push(EdgeRecord { src, dst, cost });
                }
                other => return Err(perr(format!("unknown directive `{other}`"))),
            }
        }
        let last = text.lines().count().max(1);
        let missing = |what: &str| GameError::Parse {
            line: last,
            message: format!("missing `{what}` line"),
        };
        if !header_seen {
            return Err(missing(HEADER));
        }
        let file = GameFile {
            k: k.ok_or_else(|| missing("k"))?,
            mu,
            propositions: propositions.unwrap_or_default(),
            states,
            init: init.ok_or_else(|| missing("init"))?,
            edges,
        };
        file.into_game(Some(&lines))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "k {}", self.k());
        if let Some(mu) = self.declared_mu() {
            let _ = writeln!(out, "mu {mu}");
        }
        let _ = writeln!(out, "propositions {}", self.propositions().join(" "));
        for v in 0..self.num_states() as StateId {
            let _ = write!(out, "state {} {}", v, self.owner(v));
            for name in self.label_names(self.label(v)) {
                let _ = write!(out, " {name}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "init {}", self.initial());
        for e in self.edges() {
            let _ = writeln!(out, "edge {} {} {}", e.src, e.dst, e.cost);
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self, GameError> {
        let file: GameFile =
            serde_json::from_str(text).map_err(|e| GameError::Json(e.to_string()))?;
        file.into_game(None)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GameFile::from_game(self)).expect("serializable")
    }
}
