//! Conjunctions of `G(bexpr)` and `F(bexpr)` terms.
//!
//! ```text
//! formula := term ('&' term)*
//! term    := 'G' '(' bexpr ')' | 'F' '(' bexpr ')'
//! bexpr   := bexpr '|' bexpr | bexpr '&' bexpr | '!' bexpr | '(' bexpr ')'
//!          | 'true' | 'false' | proposition
//! ```
//!
//! `!` binds tighter than `&`, which binds tighter than `|`.

use std::fmt;

use super::ObjectiveError;
use crate::game::PropSet;
use crate::lasso::Lasso;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolExpr {
    Const(bool),
    Prop(String),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn eval(&self, holds: &dyn Fn(&str) -> bool) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Prop(p) => holds(p),
            BoolExpr::Not(e) => !e.eval(holds),
            BoolExpr::And(a, b) => a.eval(holds) && b.eval(holds),
            BoolExpr::Or(a, b) => a.eval(holds) || b.eval(holds),
        }
    }

    pub fn propositions(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Prop(p) => {
                if !out.contains(&p.as_str()) {
                    out.push(p)
                }
            }
            BoolExpr::Not(e) => e.collect_props(out),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BoolExpr::Or(..) => 1,
            BoolExpr::And(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, e: &BoolExpr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            BoolExpr::Const(b) => write!(f, "{b}"),
            BoolExpr::Prop(p) => f.write_str(p),
            BoolExpr::Not(e) => {
                f.write_str("!")?;
                child(f, e, 3)
            }
            BoolExpr::And(a, b) => {
                child(f, a, 2)?;
                f.write_str(" & ")?;
                child(f, b, 3)
            }
            BoolExpr::Or(a, b) => {
                child(f, a, 1)?;
                f.write_str(" | ")?;
                child(f, b, 2)
            }
        }
    }
}

/// `⋀ G(safety_i) ∧ ⋀ F(reach_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentFormula {
    pub safety_terms: Vec<BoolExpr>,
    pub reach_terms: Vec<BoolExpr>,
}

impl FragmentFormula {
    pub fn parse(text: &str) -> Result<Self, ObjectiveError> {
        parse_fragment(text)
    }

    pub fn propositions(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in self.safety_terms.iter().chain(&self.reach_terms) {
            for p in e.propositions() {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }
}

impl fmt::Display for FragmentFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .safety_terms
            .iter()
            .map(|e| format!("G({e})"))
            .chain(self.reach_terms.iter().map(|e| format!("F({e})")))
            .collect();
        f.write_str(&terms.join(" & "))
    }
}

/// Evaluates the formula directly on an eventually periodic label sequence:
/// every safety term must hold at every position, every reach term at some
/// position of the prefix or the cycle.
pub fn eval_fragment_on_lasso(
    formula: &FragmentFormula,
    universe: &[String],
    labels: &Lasso<PropSet>,
) -> Result<bool, ObjectiveError> {
    for p in formula.propositions() {
        if !universe.iter().any(|u| u == p) {
            return Err(ObjectiveError::UnknownProposition(p.to_string()));
        }
    }
    let holds_at = |e: &BoolExpr, set: PropSet| {
        e.eval(&|name: &str| {
            universe
                .iter()
                .position(|u| u == name)
                .is_some_and(|i| set.contains(i))
        })
    };
    let safe = formula
        .safety_terms
        .iter()
        .all(|e| labels.support().all(|&set| holds_at(e, set)));
    let reached = formula
        .reach_terms
        .iter()
        .all(|e| labels.support().any(|&set| holds_at(e, set)));
    Ok(safe && reached)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Not,
    And,
    Or,
}

struct Lexed {
    tok: Tok,
    /// 1-based character column.
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ObjectiveError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '!' | '~' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            _ => None,
        };
        if let Some(tok) = simple {
            // accept `&&` and `||` as well
            if matches!(tok, Tok::And | Tok::Or) && chars.get(i + 1) == Some(&c) {
                i += 1;
            }
            out.push(Lexed { tok, col });
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Lexed {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else {
            return Err(ObjectiveError::Syntax {
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |l| l.col)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ObjectiveError> {
        Err(ObjectiveError::Syntax {
            column: self.col(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ObjectiveError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<FragmentFormula, ObjectiveError> {
        let mut f = FragmentFormula {
            safety_terms: Vec::new(),
            reach_terms: Vec::new(),
        };
        loop {
            self.term(&mut f)?;
            match self.peek() {
                None => return Ok(f),
                Some(Tok::And) => self.pos += 1,
                Some(_) => return self.error("expected `&` between temporal terms"),
            }
        }
    }

    fn term(&mut self, f: &mut FragmentFormula) -> Result<(), ObjectiveError> {
        let is_safety = match self.peek() {
            Some(Tok::Ident(op)) if op == "G" => true,
            Some(Tok::Ident(op)) if op == "F" => false,
            _ => return self.error("expected `G(` or `F(`"),
        };
        self.pos += 1;
        self.expect(Tok::LParen, "`(`")?;
        let e = self.or_expr()?;
        self.expect(Tok::RParen, "`)`")?;
        if is_safety {
            f.safety_terms.push(e);
        } else {
            f.reach_terms.push(e);
        }
        Ok(())
    }

    fn or_expr(&mut self) -> Result<BoolExpr, ObjectiveError> {
        let mut lhs = self.and_expr()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.and_expr()?;
            lhs = BoolExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<BoolExpr, ObjectiveError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = BoolExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<BoolExpr, ObjectiveError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(BoolExpr::Not(Box::new(self.unary()?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.or_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(match name.as_str() {
                    "true" => BoolExpr::Const(true),
                    "false" => BoolExpr::Const(false),
                    _ => BoolExpr::Prop(name),
                })
            }
            _ => self.error("expected a proposition, `!` or `(`"),
        }
    }
}

/// Parses the safety/reachability fragment. Proposition names are resolved
/// later, against a game's universe.
pub fn parse_fragment(text: &str) -> Result<FragmentFormula, ObjectiveError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ObjectiveError::EmptyFormula);
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
    };
    parser.formula()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_formula() {
        let f = parse_fragment("G(!collision_obstacle) & G(!collision_human) & F(reach_banana)")
            .unwrap();
        assert_eq!(f.safety_terms.len(), 2);
        assert_eq!(f.reach_terms.len(), 1);
        assert_eq!(f.reach_terms[0], BoolExpr::Prop("reach_banana".into()));
    }

    #[test]
    fn belt_formula() {
        let f = parse_fragment("G(!collision) & G(!block_human)").unwrap();
        assert_eq!((f.safety_terms.len(), f.reach_terms.len()), (2, 0));
    }

    #[test]
    fn no_dedup() {
        let f = parse_fragment("F(a) & F(a)").unwrap();
        assert_eq!(f.reach_terms.len(), 2);
        assert_eq!(f.reach_terms[0], f.reach_terms[1]);
    }

    #[test]
    fn precedence() {
        let f = parse_fragment("G(!a & b | c)").unwrap();
        let a = || Box::new(BoolExpr::Prop("a".into()));
        let expected = BoolExpr::Or(
            Box::new(BoolExpr::And(
                Box::new(BoolExpr::Not(a())),
                Box::new(BoolExpr::Prop("b".into())),
            )),
            Box::new(BoolExpr::Prop("c".into())),
        );
        assert_eq!(f.safety_terms[0], expected);
        assert_eq!(f.to_string(), "G(!a & b | c)");
        let g = parse_fragment("G(!(a | b) & (c | d))").unwrap();
        assert_eq!(parse_fragment(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn syntax_errors_carry_column() {
        assert_eq!(parse_fragment("   "), Err(ObjectiveError::EmptyFormula));
        match parse_fragment("G(a) & X(b)") {
            Err(ObjectiveError::Syntax { column, .. }) => assert_eq!(column, 8),
            other => panic!("{other:?}"),
        }
        match parse_fragment("G(a &)") {
            Err(ObjectiveError::Syntax { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
        match parse_fragment("G(a") {
            Err(ObjectiveError::Syntax { column, .. }) => assert_eq!(column, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_fragment("G(a$)"), Err(ObjectiveError::Syntax { column: 4, .. })));
    }

    #[test]
    fn lasso_semantics() {
        let f = parse_fragment("G(!bad) & F(goal)").unwrap();
        let universe = vec!["bad".to_string(), "goal".to_string()];
        let goal = PropSet(0b10);
        let bad = PropSet(0b01);
        let e = PropSet::EMPTY;
        let ok = Lasso::new(vec![e, e, e, goal], vec![e]);
        assert!(eval_fragment_on_lasso(&f, &universe, &ok).unwrap());
        let crash = Lasso::new(vec![e, goal, e, e, bad], vec![e]);
        assert!(!eval_fragment_on_lasso(&f, &universe, &crash).unwrap());
        let never = Lasso::new(vec![], vec![e]);
        assert!(!eval_fragment_on_lasso(&f, &universe, &never).unwrap());
        let unknown = parse_fragment("F(zzz)").unwrap();
        assert!(eval_fragment_on_lasso(&unknown, &universe, &never).is_err());
    }
}
