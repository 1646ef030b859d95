//! Permutations in one-line notation, their text format, lexicographic
//! generation, single-entry deletion and classical pattern containment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest length accepted by [`all_permutations`].
pub const MAX_ENUMERATION_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("malformed token {token:?} at position {position}")]
    Malformed { position: usize, token: String },
    #[error("duplicate value {value} at position {position}")]
    Duplicate { position: usize, value: u32 },
    #[error("value {value} at position {position} is outside 1..={len}")]
    OutOfRange {
        position: usize,
        value: u32,
        len: usize,
    },
    #[error("index {index} is outside 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("length {len} exceeds the enumeration limit {limit}")]
    TooLong { len: usize, limit: usize },
}

/// A permutation of `{1, …, n}` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    /// Validates that `values` is a bijection on `1..=values.len()`.
    pub fn new(values: Vec<u32>) -> Result<Self, PermError> {
        let len = values.len();
        let mut seen = vec![false; len + 1];
        for (idx, &value) in values.iter().enumerate() {
            let position = idx + 1;
            if value == 0 || value as usize > len {
                return Err(PermError::OutOfRange {
                    position,
                    value,
                    len,
                });
            }
            if std::mem::replace(&mut seen[value as usize], true) {
                return Err(PermError::Duplicate { position, value });
            }
        }
        Ok(Permutation { values })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            values: (1..=n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    pub fn is_identity(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
    }

    /// Removes the entry at 1-based `index` and renormalizes the rest to
    /// `{1, …, n-1}`, keeping relative order.
    pub fn delete_at(&self, index: usize) -> Result<Permutation, PermError> {
        if index == 0 || index > self.len() {
            return Err(PermError::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        let removed = self.values[index - 1];
        let values = self
            .values
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index - 1)
            .map(|(_, &v)| if v > removed { v - 1 } else { v })
            .collect();
        Ok(Permutation { values })
    }

    /// True iff some subsequence of `self` is order-isomorphic to `pattern`.
    pub fn contains(&self, pattern: &Permutation) -> bool {
        contains_pattern(self, pattern)
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = PermError;

    fn try_from(values: Vec<u32>) -> Result<Self, Self::Error> {
        Permutation::new(values)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.values
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_permutation(s)
    }
}

/// Parses whitespace- and/or comma-separated positive integers.
pub fn parse_permutation(text: &str) -> Result<Permutation, PermError> {
    let mut values = Vec::new();
    for (idx, token) in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .enumerate()
    {
        let value = token
            .parse::<u32>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| PermError::Malformed {
                position: idx + 1,
                token: token.to_string(),
            })?;
        values.push(value);
    }
    Permutation::new(values)
}

/// Rearranges `values` into the lexicographically next arrangement.
/// Returns false (leaving `values` untouched) when it is already the last.
pub(crate) fn next_permutation(values: &mut [u32]) -> bool {
    let n = values.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && values[i - 1] >= values[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while values[j] <= values[i - 1] {
        j -= 1;
    }
    values.swap(i - 1, j);
    values[i..].reverse();
    true
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The permutation of length `n` with lexicographic rank `rank` (0-based).
pub fn nth_permutation(n: usize, mut rank: u64) -> Permutation {
    let mut pool: Vec<u32> = (1..=n as u32).collect();
    let mut values = Vec::with_capacity(n);
    for remaining in (1..=n).rev() {
        let block = factorial(remaining - 1);
        let idx = (rank / block) as usize;
        rank %= block;
        values.push(pool.remove(idx));
    }
    Permutation { values }
}

/// Lexicographic stream over a contiguous block of permutations of one length.
#[derive(Debug, Clone)]
pub struct Permutations {
    current: Option<Vec<u32>>,
    remaining: u64,
}

impl Permutations {
    /// `count` permutations of length `n` starting at lexicographic rank `start`.
    pub fn block(n: usize, start: u64, count: u64) -> Result<Self, PermError> {
        if n > MAX_ENUMERATION_LEN {
            return Err(PermError::TooLong {
                len: n,
                limit: MAX_ENUMERATION_LEN,
            });
        }
        let total = factorial(n);
        let count = count.min(total.saturating_sub(start));
        let current = (count > 0).then(|| nth_permutation(n, start).values);
        Ok(Permutations {
            current,
            remaining: count,
        })
    }
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let values = self.current.as_mut()?;
        let out = Permutation {
            values: values.clone(),
        };
        if self.remaining > 0 && !next_permutation(values) {
            self.remaining = 0;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

impl ExactSizeIterator for Permutations {}

/// All `n!` permutations of length `n` in lexicographic order.
pub fn all_permutations(n: usize) -> Result<Permutations, PermError> {
    Permutations::block(n, 0, factorial(n))
}

/// Exhaustive subsequence search for an occurrence of `pattern` in `text`.
///
/// Each candidate entry is checked against every entry already chosen, so a
/// partial occurrence is always order-isomorphic to the pattern prefix.
/// Branches that can no longer fit the rest of the pattern are cut.
pub fn contains_pattern(text: &Permutation, pattern: &Permutation) -> bool {
    fn extend(text: &[u32], pattern: &[u32], chosen: &mut Vec<u32>, from: usize) -> bool {
        let k = chosen.len();
        if k == pattern.len() {
            return true;
        }
        let needed = pattern.len() - k;
        let last_start = text.len() - needed;
        for i in from..=last_start {
            let candidate = text[i];
            let fits = chosen
                .iter()
                .zip(pattern)
                .all(|(&c, &q)| (c < candidate) == (q < pattern[k]));
            if fits {
                chosen.push(candidate);
                if extend(text, pattern, chosen, i + 1) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    if pattern.len() > text.len() {
        return false;
    }
    let mut chosen = Vec::with_capacity(pattern.len());
    extend(text.values(), pattern.values(), &mut chosen, 0)
}
