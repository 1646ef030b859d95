//! Deterministic greedy runners on `t` stacks in series, the single-pass
//! stack operator, iterated-pass sortability, and the left/right dominance
//! comparison at critical moments.

use serde::{Deserialize, Serialize};

use crate::machine::{MachineError, MachineState, Move, Snapshot};
use crate::perm::Permutation;

/// Which end of the legal-move order a greedy run takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Priority {
    /// Leftmost destination first: output, transfers toward the exit, input last.
    Left,
    /// Rightmost destination first: input first, output last.
    Right,
}

impl Priority {
    pub fn name(self) -> &'static str {
        match self {
            Priority::Left => "left",
            Priority::Right => "right",
        }
    }

    /// The first legal move of `state` under this priority.
    pub fn choose(self, state: &MachineState) -> Option<Move> {
        match self {
            Priority::Left => state.move_order().find(|&m| state.is_legal(m)),
            Priority::Right => state.move_order().rev().find(|&m| state.is_legal(m)),
        }
    }
}

/// Where a failed run got stuck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// Critical moment at which the run failed (1-based input index).
    pub index: usize,
    /// Next input value, the one that can no longer enter.
    pub blocked: Option<u32>,
    /// Top of the entry stack, smaller than `blocked`, that keeps it out.
    pub gamma: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortOutcome {
    pub sorted: bool,
    pub moves: Vec<Move>,
    /// One snapshot per critical moment `1..=n`; after a failure the failure
    /// state stands in for every remaining index.
    pub critical_snapshots: Vec<Snapshot>,
    pub failure: Option<Failure>,
}

/// Final line of a serialized run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub sorted: bool,
    pub blocked: Option<u32>,
    pub gamma: Option<u32>,
}

impl SortOutcome {
    pub fn record(&self) -> OutcomeRecord {
        OutcomeRecord {
            sorted: self.sorted,
            blocked: self.failure.and_then(|f| f.blocked),
            gamma: self.failure.and_then(|f| f.gamma),
        }
    }
}

fn failure_of(state: &MachineState) -> Failure {
    let blocked = state.next_input();
    let gamma = match (blocked, state.top(1)) {
        (Some(b), Some(top)) if top < b => Some(top),
        _ => None,
    };
    Failure {
        index: state.cursor() + 1,
        blocked,
        gamma,
    }
}

pub fn run_greedy(
    p: &Permutation,
    t: usize,
    priority: Priority,
) -> Result<SortOutcome, MachineError> {
    run_with(p, t, |s| priority.choose(s))
}

/// Runs `p` through `t` stacks, taking whatever move `choose` picks until it
/// picks none.
pub fn run_with<F>(p: &Permutation, t: usize, choose: F) -> Result<SortOutcome, MachineError>
where
    F: Fn(&MachineState) -> Option<Move>,
{
    let mut state = MachineState::initial(p, t)?;
    let n = p.len();
    let mut moves = Vec::new();
    let mut critical_snapshots = Vec::with_capacity(n);
    while let Some(mv) = choose(&state) {
        if mv == Move::InputPush {
            critical_snapshots.push(state.snapshot(state.cursor() + 1));
        }
        state.apply_in_place(mv)?;
        moves.push(mv);
    }
    let failure = (!state.is_sorted()).then(|| failure_of(&state));
    if failure.is_some() {
        while critical_snapshots.len() < n {
            critical_snapshots.push(state.snapshot(critical_snapshots.len() + 1));
        }
    }
    Ok(SortOutcome {
        sorted: state.is_sorted(),
        moves,
        critical_snapshots,
        failure,
    })
}

/// Verdict-only greedy run without recording.
pub fn greedy_sorts(p: &Permutation, t: usize, priority: Priority) -> Result<bool, MachineError> {
    let mut state = MachineState::initial(p, t)?;
    while let Some(mv) = priority.choose(&state) {
        state.apply_in_place(mv)?;
    }
    Ok(state.is_sorted())
}

/// One optimal pass through a single stack: pop only when the next value
/// cannot be pushed.
pub fn stack_pass(p: &Permutation) -> Permutation {
    let mut stack: Vec<u32> = Vec::with_capacity(p.len());
    let mut out = Vec::with_capacity(p.len());
    for &x in p.values() {
        while let Some(&top) = stack.last() {
            if top > x {
                break;
            }
            out.push(top);
            stack.pop();
        }
        stack.push(x);
    }
    out.extend(stack.into_iter().rev());
    Permutation::new(out).expect("a stack pass permutes its input")
}

/// True iff `t` successive single-stack passes sort `p`.
pub fn west_t_stack_sortable(p: &Permutation, t: usize) -> bool {
    let mut q = p.clone();
    for _ in 0..t {
        if q.is_identity() {
            return true;
        }
        q = stack_pass(&q);
    }
    q.is_identity()
}

/// A value that sits strictly further left under right priority than under
/// left priority at some critical moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DominanceViolation {
    pub index: usize,
    pub value: u32,
    pub left_rank: usize,
    pub right_rank: usize,
}

/// Compares both greedy runs at every critical moment. Moments after the
/// right run has failed are skipped.
pub fn dominance_report(
    p: &Permutation,
    t: usize,
) -> Result<Option<DominanceViolation>, MachineError> {
    let left = run_greedy(p, t, Priority::Left)?;
    let right = run_greedy(p, t, Priority::Right)?;
    let last = right.failure.map_or(p.len(), |f| f.index.min(p.len()));
    for (ls, rs) in left
        .critical_snapshots
        .iter()
        .zip(&right.critical_snapshots)
        .take(last)
    {
        for (idx, (&l, &r)) in ls.ranks.iter().zip(&rs.ranks).enumerate() {
            if l > r {
                return Ok(Some(DominanceViolation {
                    index: ls.index,
                    value: idx as u32 + 1,
                    left_rank: l,
                    right_rank: r,
                }));
            }
        }
    }
    Ok(None)
}

pub fn dominance_check(p: &Permutation, t: usize) -> Result<bool, MachineError> {
    Ok(dominance_report(p, t)?.is_none())
}
