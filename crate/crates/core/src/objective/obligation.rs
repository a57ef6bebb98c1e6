use super::fragment::{BoolExpr, FragmentFormula};
use super::{LabelMonitor, ObjState, ObjectiveError};
use crate::game::PropSet;
use crate::lasso::Lasso;

/// Reach terms are tracked in a `u32` bitmask.
pub const MAX_REACH_TERMS: usize = 24;

/// Boolean expression with propositions resolved to universe indices.
#[derive(Clone, Debug, PartialEq, Eq)]
enum IndexExpr {
    Const(bool),
    Prop(usize),
    Not(Box<IndexExpr>),
    And(Box<IndexExpr>, Box<IndexExpr>),
    Or(Box<IndexExpr>, Box<IndexExpr>),
}

impl IndexExpr {
    fn compile(e: &BoolExpr, universe: &[String]) -> Result<Self, ObjectiveError> {
        Ok(match e {
            BoolExpr::Const(b) => IndexExpr::Const(*b),
            BoolExpr::Prop(name) => IndexExpr::Prop(
                universe
                    .iter()
                    .position(|u| u == name)
                    .ok_or_else(|| ObjectiveError::UnknownProposition(name.clone()))?,
            ),
            BoolExpr::Not(a) => IndexExpr::Not(Box::new(Self::compile(a, universe)?)),
            BoolExpr::And(a, b) => IndexExpr::And(
                Box::new(Self::compile(a, universe)?),
                Box::new(Self::compile(b, universe)?),
            ),
            BoolExpr::Or(a, b) => IndexExpr::Or(
                Box::new(Self::compile(a, universe)?),
                Box::new(Self::compile(b, universe)?),
            ),
        })
    }

    fn eval(&self, set: PropSet) -> bool {
        match self {
            IndexExpr::Const(b) => *b,
            IndexExpr::Prop(i) => set.contains(*i),
            IndexExpr::Not(a) => !a.eval(set),
            IndexExpr::And(a, b) => a.eval(set) && b.eval(set),
            IndexExpr::Or(a, b) => a.eval(set) || b.eval(set),
        }
    }
}

/// Deterministic monitor for a safety/reachability conjunction.
///
/// States `0..2^n` are bitmasks of satisfied reach terms; state `2^n` is the
/// absorbing `DEAD` state entered when a safety term is violated. A run
/// accepts iff it reaches the full mask and never enters `DEAD`.
#[derive(Clone, Debug)]
pub struct ObligationAutomaton {
    safety: Vec<IndexExpr>,
    reach: Vec<IndexExpr>,
}

impl ObligationAutomaton {
    pub fn compile(formula: &FragmentFormula, universe: &[String]) -> Result<Self, ObjectiveError> {
        if formula.reach_terms.len() > MAX_REACH_TERMS {
            return Err(ObjectiveError::TooManyReachTerms(formula.reach_terms.len()));
        }
        let compile_all = |terms: &[BoolExpr]| {
            terms
                .iter()
                .map(|e| IndexExpr::compile(e, universe))
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(ObligationAutomaton {
            safety: compile_all(&formula.safety_terms)?,
            reach: compile_all(&formula.reach_terms)?,
        })
    }

    pub fn num_reach(&self) -> usize {
        self.reach.len()
    }

    pub fn dead(&self) -> ObjState {
        1 << self.reach.len()
    }

    /// Mask with every reach obligation satisfied.
    pub fn full(&self) -> ObjState {
        self.dead() - 1
    }

    /// Accepts iff the run never dies and eventually fulfils every reach term.
    pub fn accepts(&self, labels: &Lasso<PropSet>) -> bool {
        let mut q = self.initial(*labels.get(0));
        for i in 1..labels.period_positions() + labels.cycle.len() {
            q = self.step(q, *labels.get(i));
        }
        q == self.full()
    }
}

impl LabelMonitor for ObligationAutomaton {
    fn num_states(&self) -> usize {
        self.dead() as usize + 1
    }

    fn initial(&self, label: PropSet) -> ObjState {
        self.step(0, label)
    }

    fn step(&self, q: ObjState, label: PropSet) -> ObjState {
        if q == self.dead() || self.safety.iter().any(|e| !e.eval(label)) {
            return self.dead();
        }
        self.reach
            .iter()
            .enumerate()
            .filter(|(_, e)| e.eval(label))
            .fold(q, |mask, (j, _)| mask | 1 << j)
    }

    fn is_dead(&self, q: ObjState) -> bool {
        q == self.dead()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::fragment::{eval_fragment_on_lasso, parse_fragment};

    fn universe() -> Vec<String> {
        ["collision_obstacle", "collision_human", "reach_banana"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn phi() -> FragmentFormula {
        parse_fragment("G(!collision_obstacle) & G(!collision_human) & F(reach_banana)").unwrap()
    }

    #[test]
    fn banana_at_step_three() {
        let a = ObligationAutomaton::compile(&phi(), &universe()).unwrap();
        let e = PropSet::EMPTY;
        let banana = PropSet(0b100);
        let labels = Lasso::new(vec![e, e, e, banana], vec![e]);
        let mut q = a.initial(e);
        for i in 1..4 {
            assert_eq!(q, 0);
            q = a.step(q, *labels.get(i));
        }
        assert_eq!(q, a.full());
        assert!(a.accepts(&labels));
        assert!(eval_fragment_on_lasso(&phi(), &universe(), &labels).unwrap());
    }

    #[test]
    fn collision_is_dead() {
        let a = ObligationAutomaton::compile(&phi(), &universe()).unwrap();
        let e = PropSet::EMPTY;
        let hit = PropSet(0b010);
        let labels = Lasso::new(vec![e, PropSet(0b100), e, e, e, hit], vec![e]);
        let mut q = a.initial(e);
        for i in 1..6 {
            q = a.step(q, *labels.get(i));
        }
        assert!(a.is_dead(q));
        assert!(a.is_dead(a.step(q, PropSet(0b100))));
        assert!(!a.accepts(&labels));
        assert!(!eval_fragment_on_lasso(&phi(), &universe(), &labels).unwrap());
    }

    #[test]
    fn pure_safety_accepts_with_empty_mask() {
        let f = parse_fragment("G(!collision_obstacle) & G(!collision_human)").unwrap();
        let a = ObligationAutomaton::compile(&f, &universe()).unwrap();
        assert_eq!(a.full(), 0);
        assert_eq!(a.num_states(), 2);
        let labels = Lasso::new(vec![PropSet(0b100)], vec![PropSet::EMPTY]);
        assert!(a.accepts(&labels));
        assert!(eval_fragment_on_lasso(&f, &universe(), &labels).unwrap());
    }

    #[test]
    fn initial_label_is_read() {
        let a = ObligationAutomaton::compile(&phi(), &universe()).unwrap();
        assert_eq!(a.initial(PropSet(0b100)), a.full());
        assert!(a.is_dead(a.initial(PropSet(0b001))));
    }

    #[test]
    fn unknown_proposition() {
        let f = parse_fragment("F(bogus)").unwrap();
        assert_eq!(
            ObligationAutomaton::compile(&f, &universe()).unwrap_err(),
            ObjectiveError::UnknownProposition("bogus".into())
        );
    }
}
