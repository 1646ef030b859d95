//! The machine of `t` stacks in series.
//!
//! Values travel right to left: input → stack 1 → stack 2 → … → stack t →
//! output. Every stack must read strictly increasing from top to bottom and
//! the output only accepts the next value of the identity.
//!
//! Positions are compared through a *rank*: output is 0, stack `k` is
//! `t + 1 - k` and the unread input is `t + 1`. Every move lowers the rank of
//! exactly one value by one.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("stack count must be at least 1, got {0}")]
    NoStacks(usize),
    #[error("illegal move {mv} in current state: {reason}")]
    IllegalMove { mv: Move, reason: &'static str },
    #[error("value {value} is outside 1..={len}")]
    ValueOutOfRange { value: u32, len: usize },
    #[error("unrecognized move {0:?}")]
    UnknownMove(String),
}

/// One atomic transfer of a single value one station to the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    /// Next input value onto stack 1.
    InputPush,
    /// Top of stack `k` onto stack `k + 1`.
    Transfer(usize),
    /// Top of stack `t` to the output.
    Output,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::InputPush => f.write_str("push"),
            Move::Transfer(k) => write!(f, "transfer:{k}"),
            Move::Output => f.write_str("output"),
        }
    }
}

impl FromStr for Move {
    type Err = MachineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "push" => Ok(Move::InputPush),
            "output" => Ok(Move::Output),
            _ => s
                .strip_prefix("transfer:")
                .and_then(|k| k.parse().ok())
                .map(Move::Transfer)
                .ok_or_else(|| MachineError::UnknownMove(s.to_string())),
        }
    }
}

impl Serialize for Move {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Move {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-value station ranks at the `index`-th critical moment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub index: usize,
    /// `ranks[v - 1]` is the rank of value `v`.
    pub ranks: Vec<usize>,
}

impl Snapshot {
    pub fn rank(&self, value: u32) -> usize {
        self.ranks[value as usize - 1]
    }
}

/// One line of a JSON-lines trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: usize,
    #[serde(rename = "move")]
    pub mv: Move,
    pub value: u32,
    /// Stacks 1..=t, each listed top first.
    pub stacks: Vec<Vec<u32>>,
    pub emitted: u32,
}

/// Full configuration of the machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineState {
    input: Arc<[u32]>,
    cursor: usize,
    // bottom first: the top of stack k is `stacks[k - 1].last()`
    stacks: Vec<Vec<u32>>,
    next_output: u32,
}

impl MachineState {
    pub fn initial(p: &Permutation, t: usize) -> Result<Self, MachineError> {
        if t == 0 {
            return Err(MachineError::NoStacks(t));
        }
        Ok(MachineState {
            input: p.values().into(),
            cursor: 0,
            stacks: vec![Vec::new(); t],
            next_output: 1,
        })
    }

    pub fn stack_count(&self) -> usize {
        self.stacks.len()
    }

    pub fn len(&self) -> usize {
        self.input.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input.is_empty()
    }

    /// Number of values already read from the input.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn remaining_input(&self) -> &[u32] {
        &self.input[self.cursor..]
    }

    pub fn next_input(&self) -> Option<u32> {
        self.input.get(self.cursor).copied()
    }

    pub fn next_output(&self) -> u32 {
        self.next_output
    }

    pub fn emitted(&self) -> u32 {
        self.next_output - 1
    }

    /// Contents of stack `k` (1-based), bottom first.
    pub fn stack(&self, k: usize) -> &[u32] {
        &self.stacks[k - 1]
    }

    pub fn top(&self, k: usize) -> Option<u32> {
        self.stacks[k - 1].last().copied()
    }

    /// Every stack listed top first, stack 1 first.
    pub fn stacks_top_first(&self) -> Vec<Vec<u32>> {
        self.stacks
            .iter()
            .map(|s| s.iter().rev().copied().collect())
            .collect()
    }

    pub fn is_sorted(&self) -> bool {
        self.next_output as usize == self.input.len() + 1
    }

    fn accepts(&self, k: usize, value: u32) -> bool {
        self.top(k).is_none_or(|top| value < top)
    }

    /// Legality of a single move, with a reason when it is illegal.
    pub fn check(&self, mv: Move) -> Result<u32, &'static str> {
        let t = self.stack_count();
        match mv {
            Move::InputPush => {
                let v = self.next_input().ok_or("input is exhausted")?;
                if self.accepts(1, v) {
                    Ok(v)
                } else {
                    Err("value exceeds the top of stack 1")
                }
            }
            Move::Transfer(k) => {
                if k == 0 || k >= t {
                    return Err("no such transfer");
                }
                let v = self.top(k).ok_or("source stack is empty")?;
                if self.accepts(k + 1, v) {
                    Ok(v)
                } else {
                    Err("value exceeds the top of the destination stack")
                }
            }
            Move::Output => match self.top(t) {
                Some(v) if v == self.next_output => Ok(v),
                Some(_) => Err("exit stack top is not the next output value"),
                None => Err("exit stack is empty"),
            },
        }
    }

    pub fn is_legal(&self, mv: Move) -> bool {
        self.check(mv).is_ok()
    }

    /// All moves in leftmost-destination-first order: output, then
    /// transfers from the exit side back to the entry side, then input.
    pub fn move_order(&self) -> impl DoubleEndedIterator<Item = Move> {
        let t = self.stack_count();
        std::iter::once(Move::Output)
            .chain((1..t).rev().map(Move::Transfer))
            .chain(std::iter::once(Move::InputPush))
    }

    /// The legal moves, leftmost destination first. Empty iff the state is
    /// sorted or stuck.
    pub fn legal_moves(&self) -> Vec<Move> {
        self.move_order().filter(|&m| self.is_legal(m)).collect()
    }

    /// Stuck: values remain but nothing can move.
    pub fn is_stuck(&self) -> bool {
        !self.is_sorted() && self.legal_moves().is_empty()
    }

    /// Applies `mv` in place, returning the moved value.
    pub fn apply_in_place(&mut self, mv: Move) -> Result<u32, MachineError> {
        let value = self
            .check(mv)
            .map_err(|reason| MachineError::IllegalMove { mv, reason })?;
        match mv {
            Move::InputPush => {
                self.cursor += 1;
                self.stacks[0].push(value);
            }
            Move::Transfer(k) => {
                self.stacks[k - 1].pop();
                self.stacks[k].push(value);
            }
            Move::Output => {
                let t = self.stack_count();
                self.stacks[t - 1].pop();
                self.next_output += 1;
            }
        }
        Ok(value)
    }

    pub fn apply(&self, mv: Move) -> Result<MachineState, MachineError> {
        let mut next = self.clone();
        next.apply_in_place(mv)?;
        Ok(next)
    }

    pub fn position_rank(&self, value: u32) -> Result<usize, MachineError> {
        if value == 0 || value as usize > self.len() {
            return Err(MachineError::ValueOutOfRange {
                value,
                len: self.len(),
            });
        }
        Ok(self.ranks()[value as usize - 1])
    }

    /// Ranks of every value, indexed by `value - 1`.
    pub fn ranks(&self) -> Vec<usize> {
        let t = self.stack_count();
        let mut ranks = vec![t + 1; self.len()];
        for v in 1..self.next_output {
            ranks[v as usize - 1] = 0;
        }
        for (idx, stack) in self.stacks.iter().enumerate() {
            for &v in stack {
                ranks[v as usize - 1] = t - idx;
            }
        }
        ranks
    }

    pub fn snapshot(&self, index: usize) -> Snapshot {
        Snapshot {
            index,
            ranks: self.ranks(),
        }
    }

    pub fn trace_event(&self, step: usize, mv: Move, value: u32) -> TraceEvent {
        TraceEvent {
            step,
            mv,
            value,
            stacks: self.stacks_top_first(),
            emitted: self.emitted(),
        }
    }

    /// One-line picture with the output on the left and the input on the
    /// right; each stack is drawn bottom first so its top faces its source.
    pub fn diagram(&self) -> String {
        let mut out = format!("out[{}]", self.emitted());
        for k in (1..=self.stack_count()).rev() {
            let body: Vec<String> = self.stack(k).iter().map(u32::to_string).collect();
            out.push_str(&format!(" <- S{k}[{}]", body.join(" ")));
        }
        let rest: Vec<String> = self.remaining_input().iter().map(u32::to_string).collect();
        out.push_str(&format!(" <- in[{}]", rest.join(" ")));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(values: &[u32]) -> Permutation {
        Permutation::new(values.to_vec()).unwrap()
    }

    fn run(state: &mut MachineState, moves: &[Move]) {
        for &m in moves {
            state.apply_in_place(m).unwrap();
        }
    }

    #[test]
    fn initial_states() {
        let s = MachineState::initial(&p(&[4, 1, 3, 2]), 1).unwrap();
        assert_eq!(s.remaining_input(), &[4, 1, 3, 2]);
        assert_eq!(s.stacks_top_first(), vec![Vec::<u32>::new()]);
        assert_eq!(s.next_output(), 1);

        let empty = MachineState::initial(&p(&[]), 3).unwrap();
        assert!(empty.is_sorted());
        assert!(empty.legal_moves().is_empty());
        assert!(!empty.is_stuck());

        let s = MachineState::initial(&p(&[3, 2, 4, 1]), 2).unwrap();
        assert_eq!(s.stack_count(), 2);
        assert_eq!(s.legal_moves(), vec![Move::InputPush]);

        assert_eq!(
            MachineState::initial(&p(&[1]), 0),
            Err(MachineError::NoStacks(0))
        );
    }

    #[test]
    fn stuck_on_231_with_one_stack() {
        let mut s = MachineState::initial(&p(&[2, 3, 1]), 1).unwrap();
        run(&mut s, &[Move::InputPush]);
        assert!(s.legal_moves().is_empty());
        assert!(s.is_stuck());
    }

    #[test]
    fn output_comes_first_when_available() {
        let mut s = MachineState::initial(&p(&[3, 2, 1, 4]), 2).unwrap();
        run(
            &mut s,
            &[
                Move::InputPush,
                Move::Transfer(1),
                Move::InputPush,
                Move::Transfer(1),
                Move::InputPush,
                Move::Transfer(1),
            ],
        );
        assert_eq!(s.stacks_top_first(), vec![vec![], vec![1, 2, 3]]);
        assert_eq!(s.legal_moves()[0], Move::Output);
        assert_eq!(s.legal_moves(), vec![Move::Output, Move::InputPush]);
        s.apply_in_place(Move::Output).unwrap();
        assert_eq!(s.next_output(), 2);
        assert_eq!(s.position_rank(1).unwrap(), 0);
    }

    #[test]
    fn pushes_respect_the_increasing_condition() {
        let mut s = MachineState::initial(&p(&[5, 2, 1, 3, 4]), 1).unwrap();
        run(&mut s, &[Move::InputPush]);
        let after = s.apply(Move::InputPush).unwrap();
        assert_eq!(after.stacks_top_first(), vec![vec![2, 5]]);
        // original unchanged
        assert_eq!(s.stacks_top_first(), vec![vec![5]]);

        // 2 5 4 1 6 7 3 on three stacks reaches 6 on stack 1 with 7 next
        let mut s = MachineState::initial(&p(&[2, 5, 4, 1, 6, 7, 3]), 3).unwrap();
        run(
            &mut s,
            &[
                Move::InputPush,
                Move::Transfer(1),
                Move::Transfer(2),
                Move::InputPush,
                Move::Transfer(1),
                Move::InputPush,
                Move::Transfer(1),
                Move::InputPush,
                Move::Transfer(1),
                Move::Transfer(2),
                Move::Output,
                Move::Output,
                Move::Transfer(2),
                Move::InputPush,
            ],
        );
        assert_eq!(s.top(1), Some(6));
        assert_eq!(s.next_input(), Some(7));
        assert!(matches!(
            s.apply(Move::InputPush),
            Err(MachineError::IllegalMove {
                mv: Move::InputPush,
                ..
            })
        ));
        assert!(s.is_stuck());
    }

    #[test]
    fn illegal_moves_are_rejected() {
        let s = MachineState::initial(&p(&[2, 1]), 2).unwrap();
        assert!(s.apply(Move::Output).is_err());
        assert!(s.apply(Move::Transfer(1)).is_err());
        assert!(s.apply(Move::Transfer(2)).is_err());
        assert!(s.apply(Move::Transfer(0)).is_err());
    }

    #[test]
    fn ranks_by_station() {
        let mut s = MachineState::initial(&p(&[1, 3, 2]), 3).unwrap();
        assert_eq!(s.position_rank(2).unwrap(), 4);
        run(&mut s, &[Move::InputPush]);
        assert_eq!(s.position_rank(1).unwrap(), 3);
        run(
            &mut s,
            &[Move::Transfer(1), Move::Transfer(2), Move::Output],
        );
        assert_eq!(s.position_rank(1).unwrap(), 0);
        assert_eq!(s.snapshot(2).ranks, vec![0, 4, 4]);
        assert!(s.position_rank(4).is_err());
        assert!(s.position_rank(0).is_err());
    }

    #[test]
    fn move_text_round_trips() {
        for m in [Move::InputPush, Move::Output, Move::Transfer(3)] {
            assert_eq!(m.to_string().parse::<Move>().unwrap(), m);
        }
        assert!("transfer:x".parse::<Move>().is_err());
        assert!("pop".parse::<Move>().is_err());
    }

    #[test]
    fn trace_event_json_shape() {
        let mut s = MachineState::initial(&p(&[2, 1]), 2).unwrap();
        let v = s.apply_in_place(Move::InputPush).unwrap();
        let ev = s.trace_event(1, Move::InputPush, v);
        assert_eq!(
            serde_json::to_string(&ev).unwrap(),
            r#"{"step":1,"move":"push","value":2,"stacks":[[2],[]],"emitted":0}"#
        );
        let back: TraceEvent = serde_json::from_str(&serde_json::to_string(&ev).unwrap()).unwrap();
        assert_eq!(back, ev);
    }

    #[test]
    fn diagram_shows_every_station() {
        let mut s = MachineState::initial(&p(&[2, 1, 3]), 2).unwrap();
        run(&mut s, &[Move::InputPush, Move::InputPush]);
        assert_eq!(s.diagram(), "out[0] <- S2[] <- S1[2 1] <- in[3]");
    }
}
