//! Eventually periodic sequences `prefix · cycle^ω`.

use serde::{Deserialize, Serialize};

/// An infinite sequence given as a finite prefix followed by a repeated,
/// nonempty cycle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lasso<T> {
    pub prefix: Vec<T>,
    pub cycle: Vec<T>,
}

impl<T> Lasso<T> {
    /// Panics if `cycle` is empty.
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        Lasso { prefix, cycle }
    }

    /// The constant sequence `x^ω`.
    pub fn constant(x: T) -> Self {
        Lasso {
            prefix: Vec::new(),
            cycle: vec![x],
        }
    }

    /// Letter at position `i` of the infinite word.
    pub fn get(&self, i: usize) -> &T {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Number of distinct positions: `|prefix| + |cycle|`.
    pub fn period_positions(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// Position index following `pos`, wrapping from the last cycle letter
    /// back to the first one.
    pub fn next_position(&self, pos: usize) -> usize {
        let next = pos + 1;
        if next < self.period_positions() {
            next
        } else {
            self.prefix.len()
        }
    }

    /// Infinite iterator over the letters.
    pub fn iter(&self) -> impl Iterator<Item = &T> + '_ {
        self.prefix.iter().chain(self.cycle.iter().cycle())
    }

    /// All letters that occur (prefix and one unrolling of the cycle).
    pub fn support(&self) -> impl Iterator<Item = &T> + '_ {
        self.prefix.iter().chain(self.cycle.iter())
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Lasso<U> {
        Lasso {
            prefix: self.prefix.iter().map(&mut f).collect(),
            cycle: self.cycle.iter().map(&mut f).collect(),
        }
    }

    pub fn try_map<U, E>(&self, mut f: impl FnMut(&T) -> Result<U, E>) -> Result<Lasso<U>, E> {
        Ok(Lasso {
            prefix: self.prefix.iter().map(&mut f).collect::<Result<_, _>>()?,
            cycle: self.cycle.iter().map(&mut f).collect::<Result<_, _>>()?,
        })
    }
}

impl<T: Clone> Lasso<T> {
    /// Same infinite word with the prefix extended by one cycle step and the
    /// cycle rotated accordingly.
    pub fn unroll_once(&self) -> Self {
        let mut prefix = self.prefix.clone();
        prefix.push(self.cycle[0].clone());
        let mut cycle = self.cycle[1..].to_vec();
        cycle.push(self.cycle[0].clone());
        Lasso { prefix, cycle }
    }

    /// First `n` letters.
    pub fn take(&self, n: usize) -> Vec<T> {
        self.iter().take(n).cloned().collect()
    }
}
