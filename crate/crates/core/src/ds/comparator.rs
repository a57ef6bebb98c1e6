use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{int, DiscountParams, LassoWord, Rational};
use crate::lasso::Lasso;

/// Dense comparator state id.
pub type CompState = u32;

/// Absorbing non-accepting state (gap index `t_low`).
pub const REJECTING_SINK: CompState = 0;
/// Absorbing accepting state (gap index `t_up`).
pub const ACCEPTING_SINK: CompState = 1;

/// Largest comparator we are willing to index with `u32` ids.
const MAX_STATES: i128 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComparatorError {
    #[error("discount parameter k must be in 1..=16, got {0}")]
    InvalidK(i64),
    #[error("approximation parameter p must be in 1..=16, got {0}")]
    InvalidP(i64),
    #[error("weight bound mu must be positive, got {0}")]
    InvalidMu(i64),
    #[error("threshold weight {value} at lasso position {position} is not a multiple of the resolution 2^-(p+k)")]
    ThresholdOffLattice { position: usize, value: Rational },
    #[error("threshold weight {value} at lasso position {position} is outside the representable range")]
    ThresholdOutOfRange { position: usize, value: Rational },
    #[error("comparator would need {0} states, which exceeds the supported size")]
    TooLarge(i128),
    #[error("letter {letter} is outside the alphabet [-{mu}, {mu}]")]
    LetterOutOfAlphabet { letter: i64, mu: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "GEQ")]
    Geq,
    #[serde(rename = "LEQ")]
    Leq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Geq => "GEQ",
            Relation::Leq => "LEQ",
        })
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "GEQ" | "geq" | ">=" => Ok(Relation::Geq),
            "LEQ" | "leq" | "<=" => Ok(Relation::Leq),
            other => Err(format!("unknown relation `{other}` (expected GEQ or LEQ)")),
        }
    }
}

/// Deterministic co-safety automaton over the weight alphabet `{-μ..μ}`
/// accepting the words whose lower-approximated discounted sum relates to the
/// threshold by `relation`.
///
/// A non-sink state is a pair (gap index `i`, threshold lasso position); its
/// lower gap value is `i · 2^-(p+k)`. The two sinks carry no position.
#[derive(Clone, Debug)]
pub struct Comparator {
    params: DiscountParams,
    mu: i64,
    relation: Relation,
    threshold: LassoWord,
    /// `±V_j · 2^(p+k)` per lasso position, signed for `relation`.
    threshold_steps: Vec<i64>,
    threshold_prefix_len: usize,
    effective_mu: i64,
    t_low: i64,
    t_up: i64,
}

impl Comparator {
    /// Comparator against the zero threshold.
    pub fn zero_threshold(
        mu: i64,
        params: DiscountParams,
        relation: Relation,
    ) -> Result<Self, ComparatorError> {
        Self::new(mu, params, relation, Lasso::constant(Rational::zero()))
    }

    pub fn new(
        mu: i64,
        params: DiscountParams,
        relation: Relation,
        threshold: LassoWord,
    ) -> Result<Self, ComparatorError> {
        if mu <= 0 {
            return Err(ComparatorError::InvalidMu(mu));
        }
        let scale = int(params.steps_per_unit());
        let sign = match relation {
            Relation::Geq => 1,
            Relation::Leq => -1,
        };
        let mut threshold_steps = Vec::with_capacity(threshold.period_positions());
        let mut max_abs = Rational::zero();
        for (position, value) in threshold.support().enumerate() {
            let scaled = value * &scale;
            if !scaled.is_integer() {
                return Err(ComparatorError::ThresholdOffLattice {
                    position,
                    value: value.clone(),
                });
            }
            let steps = scaled
                .to_integer()
                .to_i64()
                .filter(|s| s.unsigned_abs() < 1 << 40)
                .ok_or_else(|| ComparatorError::ThresholdOutOfRange {
                    position,
                    value: value.clone(),
                })?;
            threshold_steps.push(sign * steps);
            if value.abs() > max_abs {
                max_abs = value.abs();
            }
        }
        let effective_mu = mu
            + max_abs
                .ceil()
                .to_integer()
                .to_i64()
                .expect("bounded by the range check above");

        let (k, p) = (params.k(), params.p());
        let span = 1i128 << (2 * k + p);
        let t_low = -(effective_mu as i128) * span;
        let t_up = effective_mu as i128 * span + (1i128 << k);
        let positions = threshold_steps.len() as i128;
        let total = 2 + positions * (t_up - t_low - 1);
        if total > MAX_STATES {
            return Err(ComparatorError::TooLarge(total));
        }

        Ok(Comparator {
            params,
            mu,
            relation,
            threshold_prefix_len: threshold.prefix.len(),
            threshold,
            threshold_steps,
            effective_mu,
            t_low: t_low as i64,
            t_up: t_up as i64,
        })
    }

    pub fn params(&self) -> DiscountParams {
        self.params
    }

    /// Alphabet bound `μ`: letters are `-μ..=μ`.
    pub fn mu(&self) -> i64 {
        self.mu
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn threshold(&self) -> &LassoWord {
        &self.threshold
    }

    /// `μ` plus the largest threshold weight rounded up; sizes the sinks.
    pub fn effective_mu(&self) -> i64 {
        self.effective_mu
    }

    /// Gap index of the rejecting sink.
    pub fn t_low(&self) -> i64 {
        self.t_low
    }

    /// Gap index of the accepting sink.
    pub fn t_up(&self) -> i64 {
        self.t_up
    }

    fn width(&self) -> i64 {
        self.t_up - self.t_low - 1
    }

    fn positions(&self) -> usize {
        self.threshold_steps.len()
    }

    pub fn num_states(&self) -> usize {
        2 + self.positions() * self.width() as usize
    }

    pub fn initial(&self) -> CompState {
        self.state_at(0, 0).expect("gap 0 lies strictly between the sinks")
    }

    pub fn is_accepting(&self, s: CompState) -> bool {
        s == ACCEPTING_SINK
    }

    pub fn is_rejecting_sink(&self, s: CompState) -> bool {
        s == REJECTING_SINK
    }

    /// Gap index of a state (`t_low` / `t_up` for the sinks).
    pub fn gap_index(&self, s: CompState) -> i64 {
        match s {
            REJECTING_SINK => self.t_low,
            ACCEPTING_SINK => self.t_up,
            _ => self.t_low + 1 + (s as i64 - 2) % self.width(),
        }
    }

    /// Threshold lasso position of a non-sink state.
    pub fn lasso_position(&self, s: CompState) -> Option<usize> {
        match s {
            REJECTING_SINK | ACCEPTING_SINK => None,
            _ => Some(((s as i64 - 2) / self.width()) as usize),
        }
    }

    /// State with the given gap index and lasso position. Indices at or
    /// beyond the sinks map to the sinks.
    pub fn state_at(&self, gap: i64, position: usize) -> Option<CompState> {
        if gap <= self.t_low {
            return Some(REJECTING_SINK);
        }
        if gap >= self.t_up {
            return Some(ACCEPTING_SINK);
        }
        if position >= self.positions() {
            return None;
        }
        Some((2 + position as i64 * self.width() + (gap - self.t_low - 1)) as CompState)
    }

    /// Successor on `letter`, or an error when the letter is not in `{-μ..μ}`.
    pub fn try_step(&self, s: CompState, letter: i64) -> Result<CompState, ComparatorError> {
        if letter.abs() > self.mu {
            return Err(ComparatorError::LetterOutOfAlphabet {
                letter,
                mu: self.mu,
            });
        }
        Ok(self.step(s, letter))
    }

    /// Successor on `letter`; the letter must lie in the alphabet.
    pub fn step(&self, s: CompState, letter: i64) -> CompState {
        debug_assert!(letter.abs() <= self.mu);
        if s == REJECTING_SINK || s == ACCEPTING_SINK {
            return s;
        }
        let gap = self.gap_index(s);
        let position = self.lasso_position(s).expect("non-sink state");
        let a = match self.relation {
            Relation::Geq => letter,
            Relation::Leq => -letter,
        };
        let shift = self.params.steps_per_unit();
        // round_low(d·g·r + a - V_j) / r  with d = 1 + 2^-k
        let next_gap = gap + a * shift - self.threshold_steps[position]
            + gap.div_euclid(1i64 << self.params.k());
        let next_position = if position + 1 < self.positions() {
            position + 1
        } else {
            self.threshold_prefix_len
        };
        self.state_at(next_gap.clamp(self.t_low, self.t_up), next_position)
            .expect("position in range")
    }

    /// Runs the automaton on an eventually periodic integer word. Accepts iff
    /// the accepting sink is reached; a cycle through non-sink states rejects.
    pub fn accepts(&self, word: &Lasso<i64>) -> Result<bool, ComparatorError> {
        if let Some(&bad) = word.support().find(|w| w.abs() > self.mu) {
            return Err(ComparatorError::LetterOutOfAlphabet {
                letter: bad,
                mu: self.mu,
            });
        }
        let mut state = self.initial();
        let mut pos = 0usize;
        let mut seen = HashSet::new();
        loop {
            match state {
                ACCEPTING_SINK => return Ok(true),
                REJECTING_SINK => return Ok(false),
                _ => {}
            }
            if pos >= word.prefix.len() && !seen.insert((state, pos)) {
                return Ok(false);
            }
            state = self.step(state, *word.get(pos));
            pos = word.next_position(pos);
        }
    }

    /// Display name of a state: its gap index, suffixed with `@position` when
    /// the threshold lasso has more than one position.
    pub fn state_name(&self, s: CompState) -> String {
        match self.lasso_position(s) {
            Some(pos) if self.positions() > 1 => format!("{}@{}", self.gap_index(s), pos),
            _ => self.gap_index(s).to_string(),
        }
    }

    fn letters(&self) -> impl Iterator<Item = i64> {
        -self.mu..=self.mu
    }

    /// Line-oriented text export: header lines, then one `src letter dst`
    /// line per transition with states named by [`Comparator::state_name`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |ws: &[Rational]| {
            ws.iter()
                .map(|w| w.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(out, "comparator v1");
        let _ = writeln!(out, "k {}", self.params.k());
        let _ = writeln!(out, "p {}", self.params.p());
        let _ = writeln!(out, "mu {}", self.mu);
        let _ = writeln!(out, "relation {}", self.relation);
        let _ = writeln!(out, "threshold_prefix {}", join(&self.threshold.prefix));
        let _ = writeln!(out, "threshold_cycle {}", join(&self.threshold.cycle));
        let _ = writeln!(out, "states {}", self.num_states());
        let _ = writeln!(out, "initial {}", self.state_name(self.initial()));
        let _ = writeln!(out, "accepting {}", self.state_name(ACCEPTING_SINK));
        let _ = writeln!(out, "rejecting_sink {}", self.state_name(REJECTING_SINK));
        for s in 0..self.num_states() as CompState {
            let src = self.state_name(s);
            for a in self.letters() {
                let _ = writeln!(out, "{} {} {}", src, a, self.state_name(self.step(s, a)));
            }
        }
        out
    }

    /// Graphviz rendering; parallel transitions are merged into one edge
    /// labelled with all of their letters.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph comparator {\n  rankdir=LR;\n");
        let _ = writeln!(out, "  init [shape=point];");
        for s in 0..self.num_states() as CompState {
            let shape = if s == ACCEPTING_SINK {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  \"{}\" [shape={}];", self.state_name(s), shape);
        }
        let _ = writeln!(out, "  init -> \"{}\";", self.state_name(self.initial()));
        for s in 0..self.num_states() as CompState {
            let mut grouped: Vec<(CompState, Vec<i64>)> = Vec::new();
            for a in self.letters() {
                let t = self.step(s, a);
                match grouped.iter_mut().find(|(dst, _)| *dst == t) {
                    Some((_, letters)) => letters.push(a),
                    None => grouped.push((t, vec![a])),
                }
            }
            for (t, letters) in grouped {
                let label = letters
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}\"];",
                    self.state_name(s),
                    self.state_name(t),
                    label
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ds::{dsum_lasso, gap_low, rat};

    fn fig4() -> Comparator {
        Comparator::zero_threshold(1, DiscountParams::new(1, 1).unwrap(), Relation::Geq).unwrap()
    }

    fn run(c: &Comparator, word: &[i64]) -> i64 {
        let s = word.iter().fold(c.initial(), |s, &a| c.step(s, a));
        c.gap_index(s)
    }

    #[test]
    fn sink_indices_and_size() {
        let c = fig4();
        assert_eq!(c.t_low(), -8);
        assert_eq!(c.t_up(), 10);
        assert_eq!(c.num_states(), 19);
        assert_eq!(c.gap_index(c.initial()), 0);
    }

    #[test]
    fn figure_edges() {
        let c = fig4();
        let edge = |gap: i64, a: i64| c.gap_index(c.step(c.state_at(gap, 0).unwrap(), a));
        assert_eq!(edge(0, -1), -4);
        assert_eq!(edge(-4, 0), -6);
        assert_eq!(edge(-6, 1), -5);
        assert_eq!(edge(-5, 1), -4);
        assert_eq!(edge(-4, -1), -8);
        // The formula sends -4 on letter 1 to -2, not to the accepting sink.
        assert_eq!(edge(-4, 1), -2);
    }

    #[test]
    fn word_a_reaches_accepting_sink_after_eight_letters() {
        let c = fig4();
        let a = [-1, 0, 1, 1, 1, 1, 1, 1];
        let trace: Vec<i64> = (0..=a.len()).map(|n| run(&c, &a[..n])).collect();
        assert_eq!(trace, vec![0, -4, -6, -5, -4, -2, 1, 5, 10]);
    }

    #[test]
    fn accepts_paper_words() {
        let c = fig4();
        assert!(c.accepts(&Lasso::new(vec![-1, 0], vec![1])).unwrap());
        assert!(!c.accepts(&Lasso::new(vec![-1, -1], vec![1])).unwrap());
        assert!(c.accepts(&Lasso::constant(1)).unwrap());
        assert!(!c.accepts(&Lasso::constant(0)).unwrap());
        assert!(c.accepts(&Lasso::constant(2)).is_err());
    }

    #[test]
    fn interior_states_track_lower_gap() {
        let c = Comparator::zero_threshold(2, DiscountParams::new(2, 1).unwrap(), Relation::Geq)
            .unwrap();
        let params = c.params();
        let word = [1i64, -2, 0, 2, -1, 1];
        for n in 0..=word.len() {
            let letters: Vec<Rational> = word[..n].iter().map(|&x| int(x)).collect();
            let expect = gap_low(&letters, params) * int(params.steps_per_unit());
            assert_eq!(int(run(&c, &word[..n])), expect);
        }
    }

    #[test]
    fn all_mu_word_accepted() {
        for mu in 1..=3 {
            let c = Comparator::zero_threshold(mu, DiscountParams::new(2, 2).unwrap(), Relation::Geq)
                .unwrap();
            assert!(c.accepts(&Lasso::constant(mu)).unwrap());
        }
    }

    #[test]
    fn leq_is_geq_on_negated_letters() {
        let params = DiscountParams::new(1, 1).unwrap();
        let geq = Comparator::zero_threshold(1, params, Relation::Geq).unwrap();
        let leq = Comparator::zero_threshold(1, params, Relation::Leq).unwrap();
        for s in 0..geq.num_states() as CompState {
            for a in -1..=1 {
                assert_eq!(leq.step(s, a), geq.step(s, -a));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let params = DiscountParams::new(1, 1).unwrap();
        assert_eq!(
            Comparator::zero_threshold(0, params, Relation::Geq).unwrap_err(),
            ComparatorError::InvalidMu(0)
        );
        let off = Lasso::constant(rat(1, 3));
        assert!(matches!(
            Comparator::new(1, params, Relation::Geq, off),
            Err(ComparatorError::ThresholdOffLattice { .. })
        ));
    }

    #[test]
    fn nonzero_threshold_shifts_the_comparison() {
        let params = DiscountParams::new(1, 1).unwrap();
        let d = params.discount();
        // V = (1/2)^ω has DS = 3/2.
        let v = Lasso::constant(rat(1, 2));
        let c = Comparator::new(2, params, Relation::Geq, v.clone()).unwrap();
        assert_eq!(c.effective_mu(), 3);
        let threshold = dsum_lasso(&v, &d);
        for w in [
            Lasso::constant(2i64),
            Lasso::constant(1),
            Lasso::constant(0),
            Lasso::new(vec![2, 2], vec![0]),
            Lasso::new(vec![-2], vec![2]),
        ] {
            let ds = dsum_lasso(&crate::ds::int_word(&w), &d);
            if c.accepts(&w).unwrap() {
                assert!(ds >= threshold, "{w:?}");
            } else {
                assert!(ds < &threshold + params.approximation_bound(), "{w:?}");
            }
        }
    }

    #[test]
    fn text_export_lists_every_transition() {
        let c = fig4();
        let text = c.to_text();
        assert!(text.contains("\nstates 19\n"));
        for line in ["0 -1 -4", "-4 0 -6", "-6 1 -5", "-5 1 -4", "-4 -1 -8", "10 1 10"] {
            assert!(text.lines().any(|l| l == line), "missing `{line}`");
        }
        assert_eq!(text.lines().filter(|l| l.split(' ').count() == 3).count(), 19 * 3);
        assert!(c.to_dot().contains("\"10\" [shape=doublecircle]"));
    }
}
