//! Deterministic parity automata in the `dpa v1` text format.
//!
//! ```text
//! dpa v1
//! propositions a b
//! state 0 1
//! state 1 2
//! init 0
//! trans 0 1- 1      # letter bits in proposition order; `-` is a wildcard
//! trans 0 0- 0
//! default 0         # optional: target of every unlisted transition
//! ```
//!
//! Acceptance is max-parity: a run is accepting iff the largest color seen
//! infinitely often is even. The color of a run position is the color of the
//! state reached after reading that position's label.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::{LabelMonitor, ObjState, ObjectiveError};
use crate::game::PropSet;
use crate::lasso::Lasso;

/// Proposition limit for the explicit `2^n` transition table.
pub const MAX_DPA_PROPOSITIONS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityAutomaton {
    propositions: Vec<String>,
    colors: Vec<u32>,
    initial: ObjState,
    /// `table[q * 2^n + letter]`.
    table: Vec<ObjState>,
    /// Universe index of each DPA proposition (identity until rebound).
    label_bits: Vec<usize>,
}

impl ParityAutomaton {
    /// Builds a DPA from a transition function on local letters.
    pub fn from_fn(
        propositions: Vec<String>,
        colors: Vec<u32>,
        initial: ObjState,
        delta: impl Fn(ObjState, u32) -> ObjState,
    ) -> Self {
        let letters = 1u32 << propositions.len();
        let n = colors.len() as ObjState;
        let table = (0..n)
            .flat_map(|q| (0..letters).map(move |a| (q, a)))
            .map(|(q, a)| delta(q, a))
            .collect();
        let label_bits = (0..propositions.len()).collect();
        ParityAutomaton {
            propositions,
            colors,
            initial,
            table,
            label_bits,
        }
    }

    pub fn propositions(&self) -> &[String] {
        &self.propositions
    }

    pub fn color(&self, q: ObjState) -> u32 {
        self.colors[q as usize]
    }

    pub fn max_color(&self) -> u32 {
        self.colors.iter().copied().max().unwrap_or(0)
    }

    pub fn initial_state(&self) -> ObjState {
        self.initial
    }

    fn letters(&self) -> usize {
        1 << self.propositions.len()
    }

    /// Successor on a DPA-local letter (bit `i` = proposition `i`).
    pub fn step_local(&self, q: ObjState, letter: u32) -> ObjState {
        self.table[q as usize * self.letters() + letter as usize]
    }

    /// Re-targets the automaton at a game's proposition universe. Every DPA
    /// proposition must occur in `universe`; extra game propositions are
    /// ignored.
    pub fn bind(&self, universe: &[String]) -> Result<Self, ObjectiveError> {
        let label_bits = self
            .propositions
            .iter()
            .map(|p| {
                universe
                    .iter()
                    .position(|u| u == p)
                    .ok_or_else(|| ObjectiveError::PropositionMismatch(p.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ParityAutomaton {
            label_bits,
            ..self.clone()
        })
    }

    fn local_letter(&self, label: PropSet) -> u32 {
        self.label_bits
            .iter()
            .enumerate()
            .filter(|(_, &bit)| label.contains(bit))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Max-parity acceptance of the run on an eventually periodic label
    /// sequence (labels in bound-universe encoding).
    pub fn accepts(&self, labels: &Lasso<PropSet>) -> bool {
        let mut q = self.step(self.initial, *labels.get(0));
        let mut pos = 0usize;
        let mut seen: Vec<(ObjState, usize)> = Vec::new();
        loop {
            if pos >= labels.prefix.len() {
                if let Some(start) = seen.iter().position(|&c| c == (q, pos)) {
                    let max = seen[start..]
                        .iter()
                        .map(|&(s, _)| self.color(s))
                        .max()
                        .expect("nonempty cycle");
                    return max % 2 == 0;
                }
                seen.push((q, pos));
            }
            pos = labels.next_position(pos);
            q = self.step(q, *labels.get(pos));
        }
    }

    pub fn from_text(text: &str) -> Result<Self, ObjectiveError> {
        let mut header = false;
        let mut propositions: Option<Vec<String>> = None;
        let mut colors: Vec<Option<u32>> = Vec::new();
        let mut initial = None;
        let mut default = None;
        let mut trans: Vec<(usize, ObjState, String, ObjState)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| ObjectiveError::Dpa {
                line: line_no,
                message,
            };
            if !header {
                if line != "dpa v1" {
                    return Err(perr("expected header `dpa v1`".into()));
                }
                header = true;
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize, what: &str| -> Result<u32, ObjectiveError> {
                fields
                    .get(i)
                    .ok_or_else(|| perr(format!("missing {what}")))?
                    .parse::<u32>()
                    .map_err(|_| perr(format!("invalid {what} `{}`", fields[i])))
            };
            match fields[0] {
                "propositions" => {
                    let names: Vec<String> = fields[1..].iter().map(|s| s.to_string()).collect();
                    if names.len() > MAX_DPA_PROPOSITIONS {
                        return Err(perr(format!(
                            "at most {MAX_DPA_PROPOSITIONS} propositions are supported"
                        )));
                    }
                    propositions = Some(names);
                }
                "state" => {
                    let id = num(1, "state id")? as usize;
                    let color = num(2, "color")?;
                    if colors.len() <= id {
                        colors.resize(id + 1, None);
                    }
                    if colors[id].replace(color).is_some() {
                        return Err(perr(format!("duplicate state {id}")));
                    }
                }
                "init" => initial = Some(num(1, "initial state")?),
                "default" => default = Some((line_no, num(1, "default target")?)),
                "trans" => {
                    let src = num(1, "source")?;
                    let letter = fields
                        .get(2)
                        .ok_or_else(|| perr("missing letter".into()))?
                        .to_string();
                    let dst = num(3, "target")?;
                    trans.push((line_no, src, letter, dst));
                }
                other => return Err(perr(format!("unknown directive `{other}`"))),
            }
        }
        let end = text.lines().count().max(1);
        let missing = |what: &str| ObjectiveError::Dpa {
            line: end,
            message: format!("missing {what}"),
        };
        if !header {
            return Err(missing("header `dpa v1`"));
        }
        let propositions = propositions.unwrap_or_default();
        let colors: Vec<u32> = colors
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| missing(&format!("state {i} (ids must be dense)"))))
            .collect::<Result<_, _>>()?;
        if colors.is_empty() {
            return Err(missing("states"));
        }
        let n = colors.len() as ObjState;
        let initial = initial.ok_or_else(|| missing("`init` line"))?;
        let in_range = |q: ObjState, line: usize| {
            if q < n {
                Ok(q)
            } else {
                Err(ObjectiveError::Dpa {
                    line,
                    message: format!("state {q} does not exist"),
                })
            }
        };
        in_range(initial, end)?;
        if let Some((line, q)) = default {
            in_range(q, line)?;
        }
        let letters = 1usize << propositions.len();
        let mut table: Vec<Option<(ObjState, usize)>> = vec![None; n as usize * letters];
        for (line, src, pattern, dst) in &trans {
            in_range(*src, *line)?;
            in_range(*dst, *line)?;
            if pattern.len() != propositions.len()
                || !pattern.bytes().all(|b| matches!(b, b'0' | b'1' | b'-'))
            {
                return Err(ObjectiveError::Dpa {
                    line: *line,
                    message: format!(
                        "letter `{pattern}` must have {} characters from 0, 1, -",
                        propositions.len()
                    ),
                });
            }
            for letter in expand_pattern(pattern) {
                let slot = &mut table[*src as usize * letters + letter as usize];
                match slot {
                    Some((other, other_line)) if *other != *dst => {
                        return Err(ObjectiveError::Nondeterministic {
                            line: *line,
                            message: format!(
                                "state {src} on letter {} goes to both {other} (line {other_line}) and {dst}",
                                letter_string(letter, propositions.len())
                            ),
                        });
                    }
                    _ => *slot = Some((*dst, *line)),
                }
            }
        }
        let mut full = Vec::with_capacity(table.len());
        for (i, slot) in table.into_iter().enumerate() {
            match (slot, default) {
                (Some((dst, _)), _) => full.push(dst),
                (None, Some((_, dst))) => full.push(dst),
                (None, None) => {
                    return Err(ObjectiveError::Incomplete {
                        state: (i / letters) as ObjState,
                        letter: letter_string((i % letters) as u32, propositions.len()),
                    })
                }
            }
        }
        let label_bits = (0..propositions.len()).collect();
        Ok(ParityAutomaton {
            propositions,
            colors,
            initial,
            table: full,
            label_bits,
        })
    }

    /// Text export listing every transition explicitly.
    pub fn to_text(&self) -> String {
        let mut out = String::from("dpa v1\n");
        let _ = writeln!(out, "propositions {}", self.propositions.join(" "));
        for (q, c) in self.colors.iter().enumerate() {
            let _ = writeln!(out, "state {q} {c}");
        }
        let _ = writeln!(out, "init {}", self.initial);
        for q in 0..self.colors.len() as ObjState {
            for a in 0..self.letters() as u32 {
                let _ = writeln!(
                    out,
                    "trans {q} {} {}",
                    letter_string(a, self.propositions.len()),
                    self.step_local(q, a)
                );
            }
        }
        out
    }
}

fn letter_string(letter: u32, width: usize) -> String {
    (0..width)
        .map(|i| if letter >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn expand_pattern(pattern: &str) -> Vec<u32> {
    let mut out = vec![0u32];
    for (i, b) in pattern.bytes().enumerate() {
        out = match b {
            b'1' => out.into_iter().map(|l| l | 1 << i).collect(),
            b'0' => out,
            _ => out.into_iter().flat_map(|l| [l, l | 1 << i]).collect(),
        };
    }
    let mut seen = HashSet::new();
    out.retain(|l| seen.insert(*l));
    out
}

impl LabelMonitor for ParityAutomaton {
    fn num_states(&self) -> usize {
        self.colors.len()
    }

    fn initial(&self, label: PropSet) -> ObjState {
        self.step(self.initial, label)
    }

    fn step(&self, q: ObjState, label: PropSet) -> ObjState {
        self.step_local(q, self.local_letter(label))
    }
}
