//! Exhaustive counting and comparison of sortable sets.
//!
//! The `n!` permutations are cut into contiguous lexicographic blocks that
//! are scanned independently and merged in block order, so results do not
//! depend on the number of workers.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::greedy::{greedy_sorts, west_t_stack_sortable, Priority};
use crate::machine::MachineError;
use crate::oracle::{sortable, OracleError, Pruning};
use crate::perm::{factorial, Permutation, Permutations};

/// Longest length scanned with the greedy and iterated-pass deciders.
pub const MAX_GREEDY_LEN: usize = 10;
/// Longest length scanned with the oracle.
pub const MAX_ORACLE_LEN: usize = 8;

const BLOCKS: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("length {n} is beyond the {decider} limit {limit}")]
    Infeasible {
        n: usize,
        decider: String,
        limit: usize,
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("count overflowed 64 bits")]
    Overflow,
    #[error("unknown decider {0:?}")]
    UnknownDecider(String),
    #[error("cannot start {workers} workers: {reason}")]
    Workers { workers: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeciderKind {
    GreedyLeft,
    GreedyRight,
    West,
    Oracle,
    /// Oracle with the no-empty-gap prune.
    OraclePruned,
}

impl DeciderKind {
    pub const ALL: [DeciderKind; 5] = [
        DeciderKind::GreedyLeft,
        DeciderKind::GreedyRight,
        DeciderKind::West,
        DeciderKind::Oracle,
        DeciderKind::OraclePruned,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DeciderKind::GreedyLeft => "greedy-left",
            DeciderKind::GreedyRight => "greedy-right",
            DeciderKind::West => "west",
            DeciderKind::Oracle => "oracle",
            DeciderKind::OraclePruned => "oracle-pruned",
        }
    }

    pub fn max_len(self) -> usize {
        match self {
            DeciderKind::Oracle | DeciderKind::OraclePruned => MAX_ORACLE_LEN,
            _ => MAX_GREEDY_LEN,
        }
    }
}

impl fmt::Display for DeciderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DeciderKind {
    type Err = EnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" | "greedy-left" => Ok(DeciderKind::GreedyLeft),
            "right" | "greedy-right" => Ok(DeciderKind::GreedyRight),
            "west" => Ok(DeciderKind::West),
            "oracle" => Ok(DeciderKind::Oracle),
            "oracle-pruned" => Ok(DeciderKind::OraclePruned),
            other => Err(EnumError::UnknownDecider(other.to_string())),
        }
    }
}

/// A sortability predicate on `t` stacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Decider {
    pub kind: DeciderKind,
    pub t: usize,
}

impl Decider {
    pub fn new(kind: DeciderKind, t: usize) -> Self {
        Decider { kind, t }
    }

    pub fn greedy_left(t: usize) -> Self {
        Decider::new(DeciderKind::GreedyLeft, t)
    }

    pub fn greedy_right(t: usize) -> Self {
        Decider::new(DeciderKind::GreedyRight, t)
    }

    pub fn west(t: usize) -> Self {
        Decider::new(DeciderKind::West, t)
    }

    pub fn oracle(t: usize) -> Self {
        Decider::new(DeciderKind::Oracle, t)
    }

    pub fn decide(&self, p: &Permutation) -> Result<bool, EnumError> {
        let t = self.t;
        if t == 0 {
            return Err(MachineError::NoStacks(0).into());
        }
        Ok(match self.kind {
            DeciderKind::GreedyLeft => greedy_sorts(p, t, Priority::Left)?,
            DeciderKind::GreedyRight => greedy_sorts(p, t, Priority::Right)?,
            DeciderKind::West => west_t_stack_sortable(p, t),
            DeciderKind::Oracle => sortable(p, t, Pruning::None)?.is_some(),
            DeciderKind::OraclePruned => sortable(p, t, Pruning::NoEmptyGap)?.is_some(),
        })
    }

    fn check_feasible(&self, n: usize) -> Result<(), EnumError> {
        let limit = self.kind.max_len();
        if n > limit {
            return Err(EnumError::Infeasible {
                n,
                decider: self.kind.name().to_string(),
                limit,
            });
        }
        Ok(())
    }
}

/// Worker count for a scan; `0` means rayon's default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Workers(pub usize);

fn scan_blocks<T, F>(n: usize, workers: Workers, per_block: F) -> Result<Vec<T>, EnumError>
where
    T: Send,
    F: Fn(Permutations) -> Result<T, EnumError> + Sync,
{
    let total = factorial(n);
    let size = total.div_ceil(BLOCKS).max(1);
    let starts: Vec<u64> = (0..total).step_by(size as usize).collect();
    let run = || {
        starts
            .par_iter()
            .map(|&start| {
                let block =
                    Permutations::block(n, start, size).map_err(|_| EnumError::Infeasible {
                        n,
                        decider: "enumeration".to_string(),
                        limit: crate::perm::MAX_ENUMERATION_LEN,
                    })?;
                per_block(block)
            })
            .collect::<Result<Vec<T>, EnumError>>()
    };
    if workers.0 == 0 {
        return run();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.0)
        .build()
        .map_err(|e| EnumError::Workers {
            workers: workers.0,
            reason: e.to_string(),
        })?;
    pool.install(run)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub n: usize,
    pub t: usize,
    pub decider: String,
    pub count: u64,
}

pub fn count_sortable(n: usize, d: Decider, workers: Workers) -> Result<CountRow, EnumError> {
    d.check_feasible(n)?;
    let partials = scan_blocks(n, workers, |block| {
        let mut count = 0u64;
        for p in block {
            if d.decide(&p)? {
                count += 1;
            }
        }
        Ok(count)
    })?;
    let count = partials
        .into_iter()
        .try_fold(0u64, |acc, c| acc.checked_add(c))
        .ok_or(EnumError::Overflow)?;
    Ok(CountRow {
        n,
        t: d.t,
        decider: d.kind.name().to_string(),
        count,
    })
}

/// Every sortable permutation of length `n`, in lexicographic order.
pub fn sortable_set(n: usize, d: Decider, workers: Workers) -> Result<Vec<Permutation>, EnumError> {
    d.check_feasible(n)?;
    let blocks = scan_blocks(n, workers, |block| {
        let mut hits = Vec::new();
        for p in block {
            if d.decide(&p)? {
                hits.push(p);
            }
        }
        Ok(hits)
    })?;
    Ok(blocks.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SetDiff {
    pub only_a: Vec<Permutation>,
    pub only_b: Vec<Permutation>,
    pub both: u64,
}

pub fn diff_sets(n: usize, a: Decider, b: Decider, workers: Workers) -> Result<SetDiff, EnumError> {
    a.check_feasible(n)?;
    b.check_feasible(n)?;
    let parts = scan_blocks(n, workers, |block| {
        let mut part = SetDiff::default();
        for p in block {
            match (a.decide(&p)?, b.decide(&p)?) {
                (true, true) => part.both += 1,
                (true, false) => part.only_a.push(p),
                (false, true) => part.only_b.push(p),
                (false, false) => {}
            }
        }
        Ok(part)
    })?;
    let mut out = SetDiff::default();
    for part in parts {
        out.only_a.extend(part.only_a);
        out.only_b.extend(part.only_b);
        out.both = out.both.checked_add(part.both).ok_or(EnumError::Overflow)?;
    }
    Ok(out)
}

/// A sortable permutation with a one-entry deletion that is not sortable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClosureViolation {
    pub p: Permutation,
    pub q: Permutation,
}

fn violations_of(
    p: &Permutation,
    unsortable: &dyn Fn(&Permutation) -> Result<bool, EnumError>,
) -> Result<Vec<ClosureViolation>, EnumError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for i in 1..=p.len() {
        let q = p.delete_at(i).expect("index in range");
        if seen.insert(q.clone()) && unsortable(&q)? {
            out.push(ClosureViolation { p: p.clone(), q });
        }
    }
    Ok(out)
}

/// Closure check restricted to the given candidates of one length.
pub fn closure_violations_among<'a, I>(
    candidates: I,
    d: Decider,
) -> Result<Vec<ClosureViolation>, EnumError>
where
    I: IntoIterator<Item = &'a Permutation>,
{
    let mut out = Vec::new();
    for p in candidates {
        d.check_feasible(p.len())?;
        if d.decide(p)? {
            out.extend(violations_of(p, &|q| Ok(!d.decide(q)?))?);
        }
    }
    out.sort();
    Ok(out)
}

/// All pairs `(p, q)` with `p` of length `n` sortable and `q` a deletion of
/// `p` that is not. An empty list certifies deletion-closure at length `n`.
pub fn closure_violations(
    n: usize,
    d: Decider,
    workers: Workers,
) -> Result<Vec<ClosureViolation>, EnumError> {
    d.check_feasible(n)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let smaller: HashSet<Permutation> = sortable_set(n - 1, d, workers)?.into_iter().collect();
    let blocks = scan_blocks(n, workers, |block| {
        let mut found = Vec::new();
        for p in block {
            if d.decide(&p)? {
                found.extend(violations_of(&p, &|q| Ok(!smaller.contains(q)))?);
            }
        }
        Ok(found)
    })?;
    let mut out: Vec<_> = blocks.into_iter().flatten().collect();
    out.sort();
    Ok(out)
}

/// `n,t,decider,count` with a header row, LF line endings.
pub fn render_csv(rows: &[CountRow]) -> String {
    let mut out = String::from("n,t,decider,count\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.n, r.t, r.decider, r.count));
    }
    out
}

pub fn render_json(rows: &[CountRow]) -> String {
    let mut out = serde_json::to_string(rows).expect("rows serialize");
    out.push('\n');
    out
}
