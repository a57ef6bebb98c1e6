//! Qualitative objectives: the safety/reachability fragment and explicit
//! deterministic parity automata.

mod fragment;
mod obligation;
mod parity;

pub use fragment::{eval_fragment_on_lasso, parse_fragment, BoolExpr, FragmentFormula};
pub use obligation::{ObligationAutomaton, MAX_REACH_TERMS};
pub use parity::{ParityAutomaton, MAX_DPA_PROPOSITIONS};

use thiserror::Error;

use crate::game::PropSet;
use crate::lasso::Lasso;

pub type ObjState = u32;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ObjectiveError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("empty formula")]
    EmptyFormula,
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("{0} reach terms exceed the supported maximum of {MAX_REACH_TERMS}")]
    TooManyReachTerms(usize),
    #[error("dpa line {line}: {message}")]
    Dpa { line: usize, message: String },
    #[error("dpa line {line}: nondeterministic transition: {message}")]
    Nondeterministic { line: usize, message: String },
    #[error("dpa is incomplete: state {state} has no transition on letter {letter}")]
    Incomplete { state: ObjState, letter: String },
    #[error("dpa proposition `{0}` is not a game proposition")]
    PropositionMismatch(String),
}

/// A deterministic automaton reading one label per visited game state.
///
/// The run on `L(v0) L(v1) ...` is `initial(L(v0)), step(_, L(v1)), ...`:
/// the initial label is consumed before the first move.
pub trait LabelMonitor {
    fn num_states(&self) -> usize;
    fn initial(&self, label: PropSet) -> ObjState;
    fn step(&self, q: ObjState, label: PropSet) -> ObjState;
    /// Rejecting absorbing state (obligation `DEAD`).
    fn is_dead(&self, _q: ObjState) -> bool {
        false
    }
}

/// A compiled objective bound to a game's proposition universe.
#[derive(Clone, Debug)]
pub enum Objective {
    Fragment(ObligationAutomaton),
    Parity(ParityAutomaton),
}

impl Objective {
    pub fn fragment(formula: &FragmentFormula, universe: &[String]) -> Result<Self, ObjectiveError> {
        ObligationAutomaton::compile(formula, universe).map(Objective::Fragment)
    }

    pub fn parity(dpa: &ParityAutomaton, universe: &[String]) -> Result<Self, ObjectiveError> {
        dpa.bind(universe).map(Objective::Parity)
    }

    pub fn monitor(&self) -> &dyn LabelMonitor {
        match self {
            Objective::Fragment(a) => a,
            Objective::Parity(a) => a,
        }
    }

    pub fn num_states(&self) -> usize {
        self.monitor().num_states()
    }

    pub fn accepts(&self, labels: &Lasso<PropSet>) -> bool {
        match self {
            Objective::Fragment(a) => a.accepts(labels),
            Objective::Parity(a) => a.accepts(labels),
        }
    }
}
