//! Text and DOT renderings of product games.
//!
//! The text form follows the game file layout (`state`, `init`, `edge`
//! lines, edges uncosted) and appends the winning condition as `target` or
//! `color` lines:
//!
//! ```text
//! product v1
//! kind reachability
//! state 0 SYSTEM 3 17 1     # product id, owner, game, comparator, objective
//! state 1 ENVIRONMENT sink
//! init 0
//! edge 0 1
//! target 5 9
//! ```

use std::fmt::Write as _;

use super::{ProdState, ProductGame, ProductKind};

fn component(x: Option<u32>) -> String {
    x.map_or_else(|| "-".to_string(), |x| x.to_string())
}

impl ProductGame {
    pub fn to_text(&self) -> String {
        let mut out = String::from("product v1\n");
        let kind = match self.kind() {
            ProductKind::Reachability { .. } => "reachability",
            ProductKind::Parity { .. } => "parity",
        };
        let _ = writeln!(out, "kind {kind}");
        for u in 0..self.num_states() as ProdState {
            let _ = write!(out, "state {u} {}", self.owner(u));
            match self.origin(u) {
                Some(o) => {
                    let _ = writeln!(
                        out,
                        " {} {} {}",
                        o.game,
                        component(o.comparator),
                        component(o.objective)
                    );
                }
                None if self.losing_sink() == Some(u) => out.push_str(" sink\n"),
                None => out.push('\n'),
            }
        }
        let _ = writeln!(out, "init {}", self.initial());
        for u in 0..self.num_states() as ProdState {
            let mut last = None;
            for &w in self.successors(u) {
                if last != Some(w) {
                    let _ = writeln!(out, "edge {u} {w}");
                }
                last = Some(w);
            }
        }
        match self.kind() {
            ProductKind::Reachability { target } => {
                out.push_str("target");
                for (u, _) in target.iter().enumerate().filter(|(_, t)| **t) {
                    let _ = write!(out, " {u}");
                }
                out.push('\n');
            }
            ProductKind::Parity { colors } => {
                for (u, c) in colors.iter().enumerate() {
                    let _ = writeln!(out, "color {u} {c}");
                }
            }
        }
        out
    }

    /// Graphviz rendering: system states are boxes, environment states
    /// ellipses; targets are doubled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph product {\n  rankdir=LR;\n");
        for u in 0..self.num_states() as ProdState {
            let shape = match self.owner(u) {
                crate::game::Player::System => "box",
                crate::game::Player::Environment => "ellipse",
            };
            let label = match (self.origin(u), self.color(u)) {
                (Some(o), c) => {
                    let mut l = format!(
                        "{}|{}|{}",
                        o.game,
                        component(o.comparator),
                        component(o.objective)
                    );
                    if let Some(c) = c {
                        let _ = write!(l, " c{c}");
                    }
                    l
                }
                (None, _) if self.losing_sink() == Some(u) => "sink".to_string(),
                (None, _) => u.to_string(),
            };
            let peripheries = if self.is_target(u) { 2 } else { 1 };
            let _ = writeln!(
                out,
                "  {u} [shape={shape}, peripheries={peripheries}, label=\"{label}\"];"
            );
        }
        let _ = writeln!(out, "  init [shape=point];\n  init -> {};", self.initial());
        for u in 0..self.num_states() as ProdState {
            let mut last = None;
            for &w in self.successors(u) {
                if last != Some(w) {
                    let _ = writeln!(out, "  {u} -> {w};");
                }
                last = Some(w);
            }
        }
        out.push_str("}\n");
        out
    }
}
