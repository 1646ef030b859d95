//! The bundled verification run: every worked example and every exhaustive
//! small-instance statement about the four sortability notions, each as a
//! named claim that passes or fails with a reason.

use std::collections::HashSet;
use std::io::{self, Write};
use std::time::Instant;

use num_bigint::BigUint;

use crate::constructions::{
    insert_max, left_fail_family, lower_bound, lower_bound_family, right_fail_family,
    superpattern_family,
};
use crate::enumerate::{
    closure_violations, closure_violations_among, count_sortable, render_csv, sortable_set,
    ClosureViolation, Decider, DeciderKind, Workers,
};
use crate::greedy::{dominance_report, run_with, Priority};
use crate::machine::{MachineState, Move};
use crate::oracle::{replay, sortable, Pruning};
use crate::perm::{all_permutations, contains_pattern, Permutation};

pub type ClaimResult = Result<(), String>;

pub struct Claim {
    pub id: &'static str,
    pub title: &'static str,
    /// Shell command that reproduces the core of the claim.
    pub reproduce: &'static str,
    run: fn(Workers) -> ClaimResult,
}

impl Claim {
    pub fn run(&self, workers: Workers) -> ClaimResult {
        (self.run)(workers)
    }
}

fn perm(values: &[u32]) -> Permutation {
    Permutation::new(values.to_vec()).expect("literal permutation")
}

fn expect(cond: bool, what: impl FnOnce() -> String) -> ClaimResult {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

type Chooser<'a> = &'a dyn Fn(&MachineState) -> Option<Move>;

fn sorts_with(p: &Permutation, t: usize, choose: Chooser) -> Result<bool, String> {
    run_with(p, t, choose).map(|o| o.sorted).map_err(err)
}

fn left(s: &MachineState) -> Option<Move> {
    Priority::Left.choose(s)
}

fn right(s: &MachineState) -> Option<Move> {
    Priority::Right.choose(s)
}

pub fn one_stack_example(_: Workers) -> ClaimResult {
    one_stack_example_with(&left, &right)
}

fn one_stack_example_with(left: Chooser, right: Chooser) -> ClaimResult {
    let sortable_one = perm(&[4, 1, 3, 2]);
    let unsortable_one = perm(&[2, 3, 1]);
    for (name, choose) in [("left", left), ("right", right)] {
        expect(sorts_with(&sortable_one, 1, choose)?, || {
            format!("4 1 3 2 not sorted by {name}-greedy on 1 stack")
        })?;
        expect(!sorts_with(&unsortable_one, 1, choose)?, || {
            format!("2 3 1 sorted by {name}-greedy on 1 stack")
        })?;
    }
    Ok(())
}

fn set_of(n: usize, d: Decider, workers: Workers) -> Result<HashSet<Permutation>, String> {
    Ok(sortable_set(n, d, workers)
        .map_err(err)?
        .into_iter()
        .collect())
}

pub fn west_equivalence(workers: Workers) -> ClaimResult {
    for t in 1..=3 {
        for n in 0..=8 {
            let right = sortable_set(n, Decider::greedy_right(t), workers).map_err(err)?;
            let west = sortable_set(n, Decider::west(t), workers).map_err(err)?;
            expect(right == west, || {
                format!("right-greedy and iterated passes differ at n={n}, t={t}")
            })?;
        }
    }
    Ok(())
}

pub fn right_within_left(workers: Workers) -> ClaimResult {
    for t in 1..=3 {
        for n in 0..=8 {
            let right = sortable_set(n, Decider::greedy_right(t), workers).map_err(err)?;
            let left = set_of(n, Decider::greedy_left(t), workers)?;
            if let Some(p) = right.iter().find(|p| !left.contains(*p)) {
                return Err(format!(
                    "{p} sorted by right-greedy but not left-greedy on {t} stacks"
                ));
            }
        }
    }
    Ok(())
}

pub fn dominance(_: Workers) -> ClaimResult {
    use rayon::prelude::*;
    for t in 1..=4 {
        for n in 0..=7 {
            let all: Vec<_> = all_permutations(n).map_err(err)?.collect();
            let bad = all
                .par_iter()
                .map(|p| dominance_report(p, t).map(|r| r.map(|v| (p.clone(), v))))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?
                .into_iter()
                .flatten()
                .next();
            if let Some((p, v)) = bad {
                return Err(format!(
                    "{p} on {t} stacks: value {} has rank {} (left) > {} (right) at critical moment {}",
                    v.value, v.left_rank, v.right_rank, v.index
                ));
            }
        }
    }
    Ok(())
}

pub fn named_examples(_: Workers) -> ClaimResult {
    named_examples_with(&left, &right)
}

fn named_examples_with(left: Chooser, right: Chooser) -> ClaimResult {
    let p3241 = perm(&[3, 2, 4, 1]);
    expect(sorts_with(&p3241, 2, left)?, || {
        "3 2 4 1 not sorted by left-greedy on 2 stacks".into()
    })?;
    expect(!sorts_with(&p3241, 2, right)?, || {
        "3 2 4 1 sorted by right-greedy on 2 stacks".into()
    })?;

    for t in 2..=4 {
        let p = right_fail_family(t).map_err(err)?;
        expect(sorts_with(&p, 2, left)?, || {
            format!("{p} not sorted by left-greedy on 2 stacks")
        })?;
        expect(!sorts_with(&p, t, right)?, || {
            format!("{p} sorted by right-greedy on {t} stacks")
        })?;
    }

    let p = perm(&[6, 3, 7, 2, 4, 5, 1]);
    expect(sorts_with(&p, 3, right)?, || {
        format!("{p} not sorted by right-greedy on 3 stacks")
    })?;
    let p = perm(&[6, 8, 3, 7, 2, 4, 5, 1]);
    expect(!sorts_with(&p, 3, right)?, || {
        format!("{p} sorted by right-greedy on 3 stacks")
    })?;

    let base = left_fail_family(3).map_err(err)?;
    let run = run_with(&base, 3, left).map_err(err)?;
    expect(!run.sorted, || {
        format!("{base} sorted by left-greedy on 3 stacks")
    })?;
    let blocked = run.failure.and_then(|f| f.blocked);
    expect(blocked == Some(7), || {
        format!("{base}: left-greedy blocked on {blocked:?}, expected 7")
    })?;
    let w = sortable(&base, 3, Pruning::None).map_err(err)?;
    expect(w.as_ref().is_some_and(|w| replay(&base, 3, w)), || {
        format!("{base} has no valid 3-stack witness")
    })?;

    let sup = superpattern_family(3).map_err(err)?;
    expect(sorts_with(&sup, 3, left)?, || {
        format!("{sup} not sorted by left-greedy on 3 stacks")
    })?;
    expect(contains_pattern(&sup, &base), || {
        format!("{sup} does not contain {base}")
    })?;
    Ok(())
}

/// Catalan numbers from the closed form, independent of any enumeration.
fn catalan(n: u64) -> u64 {
    (0..n).fold(1u64, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

pub fn optimality_small_t(workers: Workers) -> ClaimResult {
    let avoid = perm(&[2, 3, 1]);
    for t in 1..=2 {
        for n in 0..=8 {
            let left = sortable_set(n, Decider::greedy_left(t), workers).map_err(err)?;
            let oracle = sortable_set(n, Decider::oracle(t), workers).map_err(err)?;
            expect(left == oracle, || {
                format!("left-greedy and oracle differ at n={n}, t={t}")
            })?;
            if t == 1 {
                let avoiders: Vec<_> = all_permutations(n)
                    .map_err(err)?
                    .filter(|p| !contains_pattern(p, &avoid))
                    .collect();
                expect(left == avoiders, || {
                    format!("1-stack set is not the 231-avoiders at n={n}")
                })?;
                let want = catalan(n as u64);
                expect(left.len() as u64 == want, || {
                    format!(
                        "{} one-stack sortable permutations of length {n}, expected {want}",
                        left.len()
                    )
                })?;
            }
        }
    }
    Ok(())
}

/// Slots `1..=t` (capped at the new length) and the last slot.
fn first_t_or_last(new_len: usize, t: usize) -> Vec<usize> {
    let mut slots: Vec<usize> = (1..=t.min(new_len)).collect();
    if !slots.contains(&new_len) {
        slots.push(new_len);
    }
    slots
}

fn insertion_check(
    t: usize,
    base_sortable: &dyn Fn(&Permutation) -> Result<bool, String>,
    result_sortable: &dyn Fn(&Permutation) -> Result<bool, String>,
    slots: &dyn Fn(usize) -> Vec<usize>,
    label: &str,
) -> ClaimResult {
    for len in 0..=6 {
        for base in all_permutations(len).map_err(err)? {
            if !base_sortable(&base)? {
                continue;
            }
            for slot in slots(len + 1) {
                let q = insert_max(&base, slot).map_err(err)?;
                expect(result_sortable(&q)?, || {
                    format!("{label}, t={t}: {base} with max at slot {slot} gives {q}")
                })?;
            }
        }
    }
    Ok(())
}

fn greedy_left(t: usize) -> impl Fn(&Permutation) -> Result<bool, String> {
    move |p| Decider::greedy_left(t).decide(p).map_err(err)
}

fn oracle(t: usize) -> impl Fn(&Permutation) -> Result<bool, String> {
    move |p| Decider::oracle(t).decide(p).map_err(err)
}

pub fn insertions(_: Workers) -> ClaimResult {
    for t in 2..=3 {
        let anywhere = |len: usize| (1..=len).collect::<Vec<_>>();
        let front_or_last = move |len: usize| first_t_or_last(len, t);
        insertion_check(
            t,
            &greedy_left(t - 1),
            &greedy_left(t),
            &anywhere,
            "left-greedy insertion",
        )?;
        insertion_check(
            t,
            &oracle(t - 1),
            &oracle(t),
            &anywhere,
            "any-strategy insertion",
        )?;
        insertion_check(
            t,
            &greedy_left(t),
            &greedy_left(t),
            &front_or_last,
            "left-greedy first-t-or-last",
        )?;
        insertion_check(
            t,
            &oracle(t),
            &oracle(t),
            &front_or_last,
            "any-strategy first-t-or-last",
        )?;
    }
    let right = |p: &Permutation, t| Decider::greedy_right(t).decide(p).map_err(err);
    let base = perm(&[3, 2, 1]);
    let grown = insert_max(&base, 3).map_err(err)?;
    expect(right(&base, 1)? && !right(&grown, 2)?, || {
        "3 2 1 -> 3 2 4 1 should break right-greedy".into()
    })?;
    let base = perm(&[6, 3, 7, 2, 4, 5, 1]);
    let grown = insert_max(&base, 2).map_err(err)?;
    expect(right(&base, 3)? && !right(&grown, 3)?, || {
        format!("{base} -> {grown} should break right-greedy")
    })?;
    Ok(())
}

pub fn lower_bound_claim(workers: Workers) -> ClaimResult {
    for t in 2..=3 {
        for n in t..=8 {
            let bound = lower_bound(n, t).map_err(err)?;
            if n > t {
                let family: Vec<_> = lower_bound_family(n, t).map_err(err)?.collect();
                let distinct: HashSet<_> = family.iter().collect();
                expect(
                    BigUint::from(distinct.len()) == bound && family.len() == distinct.len(),
                    || {
                        format!(
                            "family(n={n}, t={t}) has {} members ({} distinct), bound {bound}",
                            family.len(),
                            distinct.len()
                        )
                    },
                )?;
                for p in &family {
                    expect(greedy_left(t)(p)?, || {
                        format!("family member {p} not left-greedy sortable on {t} stacks")
                    })?;
                }
            }
            let count = count_sortable(n, Decider::greedy_left(t), workers)
                .map_err(err)?
                .count;
            expect(BigUint::from(count) >= bound, || {
                format!("count {count} below bound {bound} at n={n}, t={t}")
            })?;
        }
    }
    Ok(())
}

pub fn empty_stack_pruning(workers: Workers) -> ClaimResult {
    for t in 1..=3 {
        for n in 0..=7 {
            let plain = sortable_set(n, Decider::oracle(t), workers).map_err(err)?;
            let pruned = sortable_set(n, Decider::new(DeciderKind::OraclePruned, t), workers)
                .map_err(err)?;
            expect(plain == pruned, || {
                format!("pruned oracle disagrees at n={n}, t={t}")
            })?;
        }
    }
    Ok(())
}

pub fn closed_classes(workers: Workers) -> ClaimResult {
    for n in 1..=7 {
        let v = closure_violations(n, Decider::greedy_left(2), workers).map_err(err)?;
        if let Some(v) = v.first() {
            return Err(format!(
                "2-stack left-greedy class not closed: {} sortable, {} not",
                v.p, v.q
            ));
        }
    }
    let sup = superpattern_family(3).map_err(err)?;
    let base = left_fail_family(3).map_err(err)?;
    let v = closure_violations_among([&sup], Decider::greedy_left(3)).map_err(err)?;
    let pair = ClosureViolation { p: sup, q: base };
    expect(v.contains(&pair), || {
        format!("({}, {}) not reported as a violation", pair.p, pair.q)
    })
}

pub fn parallel_stability(_: Workers) -> ClaimResult {
    let d = Decider::greedy_left(2);
    let one = render_csv(&[count_sortable(8, d, Workers(1)).map_err(err)?]);
    let eight = render_csv(&[count_sortable(8, d, Workers(8)).map_err(err)?]);
    expect(one == eight, || {
        format!("1 worker gave {one:?}, 8 workers gave {eight:?}")
    })
}

pub fn claims() -> Vec<Claim> {
    vec![
        Claim {
            id: "one-stack-example",
            title: "4 1 3 2 sorts on one stack under both priorities; 2 3 1 does not",
            reproduce: "stacksort trace --stacks 1 --algo left \"4 1 3 2\"",
            run: one_stack_example,
        },
        Claim {
            id: "west-equivalence",
            title: "right-greedy sortable = t passes sort, n <= 8, t <= 3",
            reproduce: "stacksort compare --stacks 3 --len 8 --algo right,west",
            run: west_equivalence,
        },
        Claim {
            id: "right-within-left",
            title: "right-greedy sortable implies left-greedy sortable, n <= 8, t <= 3",
            reproduce: "stacksort compare --stacks 3 --len 8 --algo right,left",
            run: right_within_left,
        },
        Claim {
            id: "dominance",
            title: "left-greedy is never behind right-greedy at critical moments, n <= 7, t <= 4",
            reproduce: "cargo test -p stacks-core --test acceptance",
            run: dominance,
        },
        Claim {
            id: "named-examples",
            title: "worked examples: 3241, (t+1)..2(t+2)1, 6372451, 68372451, 2541673, 26351784",
            reproduce: "stacksort check --stacks 3 --algo oracle \"2 5 4 1 6 7 3\"",
            run: named_examples,
        },
        Claim {
            id: "optimality-t-le-2",
            title: "left-greedy = any strategy for t <= 2, n <= 8; one stack gives Catalan counts",
            reproduce: "stacksort compare --stacks 2 --len 8 --algo left,oracle",
            run: optimality_small_t,
        },
        Claim {
            id: "insertions",
            title: "inserting the maximum preserves sortability (anywhere: t-1 -> t; first t or last: t -> t)",
            reproduce: "stacksort generate insert-max --slot 3 \"3 2 1\"",
            run: insertions,
        },
        Claim {
            id: "lower-bound",
            title: "lower-bound family has t!(t+1)^(n-t) distinct sortable members, t in {2,3}, n <= 8",
            reproduce: "stacksort generate lower-bound-family --stacks 2 --len 4",
            run: lower_bound_claim,
        },
        Claim {
            id: "empty-stack-pruning",
            title: "no-empty-gap pruning keeps oracle verdicts, n <= 7, t <= 3",
            reproduce: "stacksort compare --stacks 3 --len 7 --algo oracle,oracle-pruned",
            run: empty_stack_pruning,
        },
        Claim {
            id: "closed-classes",
            title: "2-stack left-greedy class deletion-closed for n <= 7; 26351784 -> 2541673 breaks t = 3",
            reproduce: "stacksort contains \"2 6 3 5 1 7 8 4\" \"2 5 4 1 6 7 3\"",
            run: closed_classes,
        },
        Claim {
            id: "parallel-stability",
            title: "count output identical with 1 and 8 workers (n = 8, t = 2, left-greedy)",
            reproduce: "stacksort count --stacks 2 --len 8 --algo left --workers 8",
            run: parallel_stability,
        },
    ]
}

/// Runs every claim, writing one PASS/FAIL line each. True iff all pass.
pub fn run_all(workers: Workers, out: &mut dyn Write) -> io::Result<bool> {
    let mut all = true;
    for claim in claims() {
        let start = Instant::now();
        let result = claim.run(workers);
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => writeln!(out, "PASS {:<20} {:>7.2}s  {}", claim.id, secs, claim.title)?,
            Err(why) => {
                all = false;
                writeln!(out, "FAIL {:<20} {:>7.2}s  {}", claim.id, secs, claim.title)?;
                writeln!(out, "     reason: {why}")?;
                writeln!(out, "     reproduce: {}", claim.reproduce)?;
            }
        }
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_closed_form() {
        let first: Vec<u64> = (0..=8).map(catalan).collect();
        assert_eq!(first, vec![1, 1, 2, 5, 14, 42, 132, 429, 1430]);
    }

    #[test]
    fn slot_sets() {
        assert_eq!(first_t_or_last(7, 3), vec![1, 2, 3, 7]);
        assert_eq!(first_t_or_last(2, 3), vec![1, 2]);
        assert_eq!(first_t_or_last(1, 2), vec![1]);
    }

    #[test]
    fn cheap_claims_pass() {
        assert_eq!(one_stack_example(Workers(0)), Ok(()));
        assert_eq!(named_examples(Workers(0)), Ok(()));
    }

    #[test]
    fn tampered_priority_is_caught() {
        // left-greedy that admits input before moving anything leftward
        let push_first = |s: &MachineState| {
            let order = [Move::InputPush, Move::Output]
                .into_iter()
                .chain((1..s.stack_count()).rev().map(Move::Transfer));
            order.into_iter().find(|&m| s.is_legal(m))
        };
        let err = named_examples_with(&push_first, &right).unwrap_err();
        assert!(err.contains("3 2 4 1"), "{err}");

        let swapped = named_examples_with(&right, &left).unwrap_err();
        assert!(swapped.contains("3 2 4 1"), "{swapped}");
    }

    #[test]
    fn claim_ids_are_unique() {
        let ids: HashSet<_> = claims().iter().map(|c| c.id).collect();
        assert_eq!(ids.len(), claims().len());
    }
}
