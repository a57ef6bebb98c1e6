use num::{One, Zero};

use super::{int, DiscountParams, LassoWord, Rational};

/// Largest integer multiple of `2^-(p+k)` that is `<= x`.
pub fn round_low(x: &Rational, params: DiscountParams) -> Rational {
    let scale = int(params.steps_per_unit());
    (x * &scale).floor() / scale
}

/// Lower gap value: `0` on the empty word, `round_low(d · gap_low(V) + v)` on `V·v`.
pub fn gap_low(word: &[Rational], params: DiscountParams) -> Rational {
    let d = params.discount();
    word.iter()
        .fold(Rational::zero(), |gap, v| round_low(&(&d * gap + v), params))
}

/// Recoverable gap: `0` on the empty word, `d · gap(V) + v` on `V·v`.
pub fn gap_exact(word: &[Rational], d: &Rational) -> Rational {
    word.iter().fold(Rational::zero(), |gap, v| d * gap + v)
}

/// Exact discounted sum `Σ w_i / d^i` of an eventually periodic word.
pub fn dsum_lasso(word: &LassoWord, d: &Rational) -> Rational {
    assert!(*d > Rational::one(), "discount factor must exceed 1");
    let inv = d.recip();
    let mut weight = Rational::one();
    let mut prefix_sum = Rational::zero();
    for w in &word.prefix {
        prefix_sum += w * &weight;
        weight *= &inv;
    }
    let tail_weight = weight;
    let mut cycle_sum = Rational::zero();
    let mut cw = Rational::one();
    for w in &word.cycle {
        cycle_sum += w * &cw;
        cw *= &inv;
    }
    // cw is now d^-|cycle|
    prefix_sum + tail_weight * cycle_sum / (Rational::one() - cw)
}

/// `gap_low(w[..n]) / d^(n-1)`: the `n`-th term of the sequence whose limit
/// defines the lower approximation of the discounted sum.
pub fn ds_low_prefix(word: &LassoWord, n: usize, params: DiscountParams) -> Rational {
    assert!(n >= 1, "prefix length must be positive");
    let letters = word.take(n);
    let d = params.discount();
    gap_low(&letters, params) / num::pow(d, n - 1)
}

/// `μ · d^(1-n) / (d - 1)`: bound on the discounted contribution of positions
/// `>= n` of any word whose weights are bounded by `μ`.
pub fn tail_bound(n: usize, mu: i64, d: &Rational) -> Rational {
    assert!(*d > Rational::one(), "discount factor must exceed 1");
    let mu = int(mu);
    let d_pow = if n == 0 {
        d.clone()
    } else {
        num::pow(d.recip(), n - 1)
    };
    mu * d_pow / (d - Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ds::rat;
    use num::Signed;
    use crate::lasso::Lasso;

    fn params(k: u32, p: u32) -> DiscountParams {
        DiscountParams::new(k, p).unwrap()
    }

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn round_low_examples() {
        let p = params(1, 1);
        assert_eq!(round_low(&rat(-7, 8), p), int(-1));
        assert_eq!(round_low(&rat(1, 4), p), rat(1, 4));
        assert_eq!(round_low(&rat(-5, 4), p), rat(-5, 4));
    }

    #[test]
    fn round_low_matches_enumeration_of_multiples() {
        // Oracle: scan the multiples of r around x and keep the largest one <= x.
        let p = params(1, 2);
        let r = p.resolution();
        for num in -40..40 {
            let x = rat(num, 7);
            let mut best = int(-10);
            let mut m = int(-10);
            while m <= int(10) {
                if m <= x {
                    best = m.clone();
                }
                m += &r;
            }
            assert_eq!(round_low(&x, p), best, "x = {x}");
        }
    }

    #[test]
    fn gap_low_examples() {
        let p = params(1, 1);
        assert_eq!(gap_low(&[], p), int(0));
        assert_eq!(gap_low(&ints(&[-1, 0]), p), rat(-3, 2));
        // -1, -3/2, -5/4, round_low(-7/8) = -1
        assert_eq!(gap_low(&ints(&[-1, 0, 1, 1]), p), int(-1));
    }

    #[test]
    fn gap_exact_examples() {
        let d = rat(3, 2);
        assert_eq!(gap_exact(&[], &d), int(0));
        assert_eq!(gap_exact(&ints(&[-1, 0]), &d), rat(-3, 2));
    }

    #[test]
    fn gap_exact_is_scaled_prefix_sum() {
        let d = rat(5, 4);
        let word = ints(&[3, -2, 0, 1, -5]);
        let direct: Rational = word
            .iter()
            .enumerate()
            .map(|(i, w)| w / num::pow(d.clone(), i))
            .sum();
        assert_eq!(gap_exact(&word, &d), direct * num::pow(d.clone(), word.len() - 1));
    }

    #[test]
    fn dsum_examples() {
        let d = rat(3, 2);
        let a = Lasso::new(ints(&[-1, 0]), ints(&[1]));
        let b = Lasso::new(ints(&[-1, -1]), ints(&[1]));
        assert_eq!(dsum_lasso(&a, &d), rat(1, 3));
        assert_eq!(dsum_lasso(&b, &d), rat(-1, 3));
        assert_eq!(dsum_lasso(&Lasso::constant(int(0)), &rat(9, 8)), int(0));
    }

    #[test]
    fn dsum_agrees_with_truncated_sum() {
        // Oracle: explicit partial sum plus the tail bound.
        let d = rat(5, 4);
        let w = Lasso::new(ints(&[2, -3, 1]), ints(&[-1, 0, 3, 3]));
        let n = 60;
        let partial: Rational = w
            .take(n)
            .iter()
            .enumerate()
            .map(|(i, x)| x / num::pow(d.clone(), i))
            .sum();
        let diff = (dsum_lasso(&w, &d) - partial).abs();
        assert!(diff <= tail_bound(n, 3, &d));
    }

    #[test]
    fn ds_low_prefix_examples() {
        let p = params(1, 1);
        let a = Lasso::new(ints(&[-1, 0]), ints(&[1]));
        assert_eq!(ds_low_prefix(&a, 1, p), int(-1));
        let x = ds_low_prefix(&a, 30, p);
        let gap = rat(1, 3) - x;
        assert!(gap >= int(0));
        assert!(gap < p.approximation_bound() + tail_bound(30, 2, &p.discount()));
        assert_eq!(ds_low_prefix(&Lasso::constant(int(0)), 17, p), int(0));
    }

    #[test]
    fn tail_bound_examples() {
        let d = rat(3, 2);
        assert_eq!(tail_bound(0, 1, &d), int(3));
        assert_eq!(tail_bound(7, 0, &d), int(0));
        // Oracle: the geometric tail sum_{i >= n} mu / d^i, split at N; the
        // remainder beyond N is the bound at N.
        let n = 10;
        let big_n = 40;
        let partial: Rational = (n..big_n).map(|i| num::pow(d.recip(), i)).sum();
        assert_eq!(tail_bound(n, 1, &d), partial + tail_bound(big_n, 1, &d));
        assert_eq!(tail_bound(10, 1, &d), int(3) * num::pow(rat(2, 3), 10));
    }
}
