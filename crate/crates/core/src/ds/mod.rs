//! Exact discounted-sum arithmetic and the comparator automaton for the lower
//! approximation of discounted sum with discount factor `d = 1 + 2^-k`.

mod comparator;
mod gap;

pub use comparator::{
    Comparator, ComparatorError, CompState, Relation, ACCEPTING_SINK, REJECTING_SINK,
};
pub use gap::{ds_low_prefix, dsum_lasso, gap_exact, gap_low, round_low, tail_bound};

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::lasso::Lasso;

/// Exact rational number in lowest terms.
pub type Rational = BigRational;

/// An eventually periodic weight sequence.
pub type LassoWord = Lasso<Rational>;

/// Largest accepted value of `k` and `p`; keeps gap indices inside `i64`.
pub const MAX_EXPONENT: u32 = 16;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// `2^e` for a possibly negative exponent.
pub fn pow2(e: i32) -> Rational {
    let base = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

/// Integer weights lifted to exact rationals.
pub fn int_word(w: &Lasso<i64>) -> LassoWord {
    w.map(|&x| int(x))
}

/// Parameters `k` (discount factor `d = 1 + 2^-k`) and `p` (approximation
/// factor `ε = 2^-p`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscountParams {
    k: u32,
    p: u32,
}

impl DiscountParams {
    pub fn new(k: u32, p: u32) -> Result<Self, ComparatorError> {
        if k == 0 || k > MAX_EXPONENT {
            return Err(ComparatorError::InvalidK(k as i64));
        }
        if p == 0 || p > MAX_EXPONENT {
            return Err(ComparatorError::InvalidP(p as i64));
        }
        Ok(DiscountParams { k, p })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `d = 1 + 2^-k`.
    pub fn discount(&self) -> Rational {
        Rational::one() + pow2(-(self.k as i32))
    }

    /// `ε = 2^-p`.
    pub fn epsilon(&self) -> Rational {
        pow2(-(self.p as i32))
    }

    /// Resolution `r = 2^-(p+k)`; every lower gap value is a multiple of it.
    pub fn resolution(&self) -> Rational {
        pow2(-((self.p + self.k) as i32))
    }

    /// `d · ε`, the additive approximation bound of the lower approximation.
    pub fn approximation_bound(&self) -> Rational {
        self.discount() * self.epsilon()
    }

    /// `2^(p+k)`: number of resolution steps per unit weight.
    pub fn steps_per_unit(&self) -> i64 {
        1i64 << (self.p + self.k)
    }
}

impl std::fmt::Display for DiscountParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "k={} p={}", self.k, self.p)
    }
}

/// Parses `a`, `-a/b` or a finite decimal such as `0.25` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let whole_val: BigInt = if whole_abs.is_empty() {
            BigInt::zero()
        } else {
            whole_abs.parse().ok()?
        };
        let scale = num::pow(BigInt::from(10), frac.len());
        let frac_val: BigInt = frac.parse().ok()?;
        let magnitude = Rational::new(whole_val * &scale + frac_val, scale);
        return Some(if negative { -magnitude } else { magnitude });
    }
    t.parse::<BigInt>().ok().map(Rational::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_reject_zero() {
        assert!(DiscountParams::new(0, 1).is_err());
        assert!(DiscountParams::new(1, 0).is_err());
        let p = DiscountParams::new(1, 1).unwrap();
        assert_eq!(p.discount(), rat(3, 2));
        assert_eq!(p.epsilon(), rat(1, 2));
        assert_eq!(p.resolution(), rat(1, 4));
        assert_eq!(p.approximation_bound(), rat(3, 4));
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("-7/8"), Some(rat(-7, 8)));
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("-.5"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
