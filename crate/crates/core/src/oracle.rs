//! Sortability by `t` stacks in series under any strategy.
//!
//! Depth-first search over legal moves with a visited set. Every move lowers
//! the total rank, so the state graph is acyclic and a visited state that is
//! not on the current path has already been shown to be a dead end.
//!
//! Inside the search a stack is a bitmask of the values it holds: the
//! increasing condition fixes the order, and the top is the smallest member.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{MachineState, Move, TraceEvent};
use crate::perm::Permutation;

/// Longest permutation the search accepts by default.
pub const DEFAULT_MAX_LEN: usize = 10;
/// Visited-state budget per call by default.
pub const DEFAULT_MAX_STATES: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("stack count must be at least 1, got {0}")]
    NoStacks(usize),
    #[error("length {len} exceeds the search limit {limit}")]
    TooLong { len: usize, limit: usize },
    #[error("search visited more than {limit} states without a verdict")]
    StateBudgetExceeded { limit: usize },
}

/// Prune rule applied to the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pruning {
    #[default]
    None,
    /// Refuse to admit a new input value while an empty stack sits to the
    /// left of a nonempty one.
    NoEmptyGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_len: usize,
    pub max_states: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_len: DEFAULT_MAX_LEN,
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

/// A complete legal move sequence that sorts a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Witness {
    pub moves: Vec<Move>,
}

/// Where a replay went wrong. `step` is the 1-based index of the offending
/// move, or `None` when every move was legal but the run did not finish.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("replay failed at step {step:?}: {reason}")]
pub struct ReplayFailure {
    pub step: Option<usize>,
    pub reason: String,
}

/// Replays `moves` from the initial state, returning the trace on success.
pub fn replay_trace(
    p: &Permutation,
    t: usize,
    moves: &[Move],
) -> Result<Vec<TraceEvent>, ReplayFailure> {
    let mut state = MachineState::initial(p, t).map_err(|e| ReplayFailure {
        step: None,
        reason: e.to_string(),
    })?;
    let mut events = Vec::with_capacity(moves.len());
    for (i, &mv) in moves.iter().enumerate() {
        let value = state.apply_in_place(mv).map_err(|e| ReplayFailure {
            step: Some(i + 1),
            reason: e.to_string(),
        })?;
        events.push(state.trace_event(i + 1, mv, value));
    }
    if !state.is_sorted() {
        return Err(ReplayFailure {
            step: None,
            reason: format!("only {} of {} values emitted", state.emitted(), p.len()),
        });
    }
    Ok(events)
}

/// True iff `w` is a legal run that sorts `p` on `t` stacks.
pub fn replay(p: &Permutation, t: usize, w: &Witness) -> bool {
    replay_trace(p, t, &w.moves).is_ok()
}

impl Witness {
    /// Witness as a JSON array of trace records.
    pub fn to_json(&self, p: &Permutation, t: usize) -> Result<String, ReplayFailure> {
        let events = replay_trace(p, t, &self.moves)?;
        Ok(serde_json::to_string(&events).expect("trace records serialize"))
    }

    /// Reads the moves back out of a JSON array of trace records.
    pub fn from_json(text: &str) -> Result<Witness, serde_json::Error> {
        let events: Vec<TraceEvent> = serde_json::from_str(text)?;
        Ok(Witness {
            moves: events.into_iter().map(|e| e.mv).collect(),
        })
    }
}

/// Memo key: input cursor, next output value, then one bitmask per stack.
/// `next_output` is implied by the rest and kept as a consistency check.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchStateKey(Vec<u32>);

struct Search<'a> {
    input: &'a [u32],
    stacks: Vec<u32>,
    cursor: usize,
    next_output: u32,
    pruning: Pruning,
    visited: HashSet<SearchStateKey>,
    max_states: usize,
    path: Vec<Move>,
}

#[inline]
fn bit(v: u32) -> u32 {
    1 << (v - 1)
}

#[inline]
fn top(mask: u32) -> Option<u32> {
    (mask != 0).then(|| mask.trailing_zeros() + 1)
}

#[inline]
fn accepts(mask: u32, v: u32) -> bool {
    top(mask).is_none_or(|t| v < t)
}

impl Search<'_> {
    fn key(&self) -> SearchStateKey {
        let mut words = Vec::with_capacity(self.stacks.len() + 1);
        words.push(self.cursor as u32 | (self.next_output << 16));
        words.extend_from_slice(&self.stacks);
        SearchStateKey(words)
    }

    fn derived_next_output(&self) -> u32 {
        let pending = self.input[self.cursor..].iter().fold(0, |m, &v| m | bit(v));
        let held = self.stacks.iter().fold(pending, |m, &s| m | s);
        top(held).unwrap_or(self.input.len() as u32 + 1)
    }

    fn has_empty_gap(&self) -> bool {
        // stack index grows toward the exit
        let first_nonempty = self.stacks.iter().position(|&s| s != 0);
        first_nonempty.is_some_and(|k| self.stacks[k + 1..].contains(&0))
    }

    fn dfs(&mut self) -> Result<bool, OracleError> {
        let n = self.input.len() as u32;
        if self.next_output == n + 1 {
            return Ok(true);
        }
        debug_assert_eq!(self.next_output, self.derived_next_output());
        if !self.visited.insert(self.key()) {
            return Ok(false);
        }
        if self.visited.len() > self.max_states {
            return Err(OracleError::StateBudgetExceeded {
                limit: self.max_states,
            });
        }
        let t = self.stacks.len();

        // output
        if top(self.stacks[t - 1]) == Some(self.next_output) {
            let v = self.next_output;
            self.stacks[t - 1] &= !bit(v);
            self.next_output += 1;
            self.path.push(Move::Output);
            if self.dfs()? {
                return Ok(true);
            }
            self.path.pop();
            self.next_output -= 1;
            self.stacks[t - 1] |= bit(v);
        }

        // transfers, exit side first
        for k in (0..t - 1).rev() {
            let Some(v) = top(self.stacks[k]) else {
                continue;
            };
            if !accepts(self.stacks[k + 1], v) {
                continue;
            }
            self.stacks[k] &= !bit(v);
            self.stacks[k + 1] |= bit(v);
            self.path.push(Move::Transfer(k + 1));
            if self.dfs()? {
                return Ok(true);
            }
            self.path.pop();
            self.stacks[k + 1] &= !bit(v);
            self.stacks[k] |= bit(v);
        }

        // input
        if let Some(&v) = self.input.get(self.cursor) {
            let pruned = self.pruning == Pruning::NoEmptyGap && self.has_empty_gap();
            if !pruned && accepts(self.stacks[0], v) {
                self.stacks[0] |= bit(v);
                self.cursor += 1;
                self.path.push(Move::InputPush);
                if self.dfs()? {
                    return Ok(true);
                }
                self.path.pop();
                self.cursor -= 1;
                self.stacks[0] &= !bit(v);
            }
        }
        Ok(false)
    }
}

/// Searches for any legal move sequence that sorts `p` on `t` stacks.
pub fn sortable_with_limits(
    p: &Permutation,
    t: usize,
    pruning: Pruning,
    limits: SearchLimits,
) -> Result<Option<Witness>, OracleError> {
    if t == 0 {
        return Err(OracleError::NoStacks(t));
    }
    let limit = limits.max_len.min(31);
    if p.len() > limit {
        return Err(OracleError::TooLong {
            len: p.len(),
            limit,
        });
    }
    let mut search = Search {
        input: p.values(),
        stacks: vec![0; t],
        cursor: 0,
        next_output: 1,
        pruning,
        visited: HashSet::new(),
        max_states: limits.max_states,
        path: Vec::new(),
    };
    Ok(search.dfs()?.then_some(Witness { moves: search.path }))
}

pub fn sortable(
    p: &Permutation,
    t: usize,
    pruning: Pruning,
) -> Result<Option<Witness>, OracleError> {
    sortable_with_limits(p, t, pruning, SearchLimits::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{greedy_sorts, Priority};
    use crate::perm::all_permutations;

    fn p(values: &[u32]) -> Permutation {
        Permutation::new(values.to_vec()).unwrap()
    }

    #[test]
    fn named_instances() {
        let w = sortable(&p(&[2, 5, 4, 1, 6, 7, 3]), 3, Pruning::None).unwrap();
        let w = w.expect("sortable on three stacks");
        assert!(replay(&p(&[2, 5, 4, 1, 6, 7, 3]), 3, &w));
        assert!(sortable(&p(&[2, 3, 1]), 1, Pruning::None)
            .unwrap()
            .is_none());
        assert!(sortable(&p(&[3, 2, 4, 1]), 2, Pruning::NoEmptyGap)
            .unwrap()
            .is_some());
        for n in 0..=8 {
            for t in 1..=4 {
                let w = sortable(&Permutation::identity(n), t, Pruning::None)
                    .unwrap()
                    .unwrap();
                assert!(replay(&Permutation::identity(n), t, &w));
            }
        }
    }

    #[test]
    fn replay_examples() {
        assert!(!replay(&p(&[1]), 1, &Witness::default()));
        let w = Witness {
            moves: vec![Move::InputPush, Move::Transfer(1), Move::Output],
        };
        assert!(replay(&p(&[1]), 2, &w));
        let bad = Witness {
            moves: vec![Move::Output],
        };
        let err = replay_trace(&p(&[1]), 2, &bad.moves).unwrap_err();
        assert_eq!(err.step, Some(1));
        let short = replay_trace(&p(&[1]), 2, &[Move::InputPush]).unwrap_err();
        assert_eq!(short.step, None);
    }

    #[test]
    fn witness_json_round_trips() {
        let q = p(&[3, 2, 4, 1]);
        let w = sortable(&q, 2, Pruning::None).unwrap().unwrap();
        let text = w.to_json(&q, 2).unwrap();
        assert!(text.starts_with(r#"[{"step":1,"move":"push","value":3,"#));
        assert_eq!(Witness::from_json(&text).unwrap(), w);
    }

    #[test]
    fn limits_are_errors_not_verdicts() {
        let q = Permutation::identity(11);
        assert_eq!(
            sortable(&q, 2, Pruning::None),
            Err(OracleError::TooLong { len: 11, limit: 10 })
        );
        let tight = SearchLimits {
            max_len: 10,
            max_states: 3,
        };
        assert!(matches!(
            sortable_with_limits(&p(&[2, 5, 4, 1, 6, 7, 3]), 3, Pruning::None, tight),
            Err(OracleError::StateBudgetExceeded { limit: 3 })
        ));
        assert_eq!(
            sortable(&q, 0, Pruning::None),
            Err(OracleError::NoStacks(0))
        );
    }

    #[test]
    fn greedy_success_implies_oracle_success() {
        for n in 0..=6 {
            for q in all_permutations(n).unwrap() {
                for t in 1..=3 {
                    let found = sortable(&q, t, Pruning::None).unwrap();
                    if let Some(w) = &found {
                        assert!(replay(&q, t, w), "{q}");
                    }
                    if greedy_sorts(&q, t, Priority::Left).unwrap() {
                        assert!(found.is_some(), "{q} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn gap_detection() {
        let s = |stacks: Vec<u32>| Search {
            input: &[],
            stacks,
            cursor: 0,
            next_output: 1,
            pruning: Pruning::NoEmptyGap,
            visited: HashSet::new(),
            max_states: 1,
            path: Vec::new(),
        };
        assert!(!s(vec![0, 0, 0]).has_empty_gap());
        assert!(!s(vec![0, 1, 2]).has_empty_gap());
        assert!(s(vec![1, 0, 2]).has_empty_gap());
        assert!(s(vec![0, 1, 0]).has_empty_gap());
        assert!(!s(vec![4, 1, 2]).has_empty_gap());
    }
}
