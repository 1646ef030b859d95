use std::collections::HashSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use stacks_core::constructions::lower_bound;
use stacks_core::enumerate::{count_sortable, sortable_set, Decider, DeciderKind, Workers};
use stacks_core::greedy::{run_greedy, Priority};
use stacks_core::machine::MachineState;
use stacks_core::oracle::{replay, sortable, Pruning};
use stacks_core::perm::{all_permutations, Permutation};

fn arb_perm(max_len: usize) -> impl Strategy<Value = Permutation> {
    (0..=max_len)
        .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn check_state(s: &MachineState) {
    let n = s.len() as u32;
    let mut seen: Vec<u32> = (1..s.next_output()).collect();
    for k in 1..=s.stack_count() {
        let stack = s.stack(k);
        // bottom first, so strictly decreasing as stored
        assert!(
            stack.windows(2).all(|w| w[0] > w[1]),
            "stack {k} out of order: {stack:?}"
        );
        seen.extend_from_slice(stack);
    }
    seen.extend_from_slice(s.remaining_input());
    seen.sort_unstable();
    assert_eq!(seen, (1..=n).collect::<Vec<_>>());
}

proptest! {
    #[test]
    fn random_legal_play_keeps_invariants(
        p in arb_perm(9),
        t in 1usize..=4,
        picks in proptest::collection::vec(any::<prop::sample::Index>(), 0..60),
    ) {
        let mut s = MachineState::initial(&p, t).unwrap();
        let mut rank_sum: usize = s.ranks().iter().sum();
        let mut emitted = Vec::new();
        for pick in picks {
            let legal = s.legal_moves();
            if legal.is_empty() {
                break;
            }
            let mv = legal[pick.index(legal.len())];
            let before = s.ranks();
            let value = s.apply_in_place(mv).unwrap();
            let after = s.ranks();
            if mv == stacks_core::Move::Output {
                emitted.push(value);
            }
            // exactly one value moved one station left
            let changed: Vec<_> = (0..before.len()).filter(|&i| before[i] != after[i]).collect();
            prop_assert_eq!(changed.clone(), vec![value as usize - 1]);
            prop_assert_eq!(after[changed[0]] + 1, before[changed[0]]);
            let sum: usize = after.iter().sum();
            prop_assert!(sum < rank_sum);
            rank_sum = sum;
            check_state(&s);
        }
        prop_assert_eq!(emitted.clone(), (1..=emitted.len() as u32).collect::<Vec<_>>());
        prop_assert!(s.legal_moves().is_empty() || !s.is_sorted());
    }

    #[test]
    fn greedy_runs_terminate_within_bound(p in arb_perm(10), t in 1usize..=5) {
        for pr in [Priority::Left, Priority::Right] {
            let out = run_greedy(&p, t, pr).unwrap();
            prop_assert!(out.moves.len() <= p.len() * (t + 1));
            prop_assert_eq!(out.critical_snapshots.len(), p.len());
            prop_assert_eq!(out.clone(), run_greedy(&p, t, pr).unwrap());
        }
    }

    #[test]
    fn oracle_witnesses_replay(p in arb_perm(8), t in 1usize..=3) {
        let plain = sortable(&p, t, Pruning::None).unwrap();
        let pruned = sortable(&p, t, Pruning::NoEmptyGap).unwrap();
        prop_assert_eq!(plain.is_some(), pruned.is_some());
        for w in plain.iter().chain(pruned.iter()) {
            prop_assert!(replay(&p, t, w));
        }
    }
}

#[test]
fn counts_match_recorded_baseline() {
    let text = include_str!("data/baseline_counts.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,t,decider,count"));
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (n, t): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let kind: DeciderKind = f[2].parse().unwrap();
        let want: u64 = f[3].parse().unwrap();
        let got = count_sortable(n, Decider::new(kind, t), Workers(0)).unwrap();
        assert_eq!(got.count, want, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 3 * 9 * 4);
}

#[test]
fn sortable_sets_nest() {
    for t in 1..=3 {
        for n in 0..=7 {
            let set = |d| -> HashSet<Permutation> {
                sortable_set(n, d, Workers(0))
                    .unwrap()
                    .into_iter()
                    .collect()
            };
            let right = set(Decider::greedy_right(t));
            let left = set(Decider::greedy_left(t));
            let oracle = set(Decider::oracle(t));
            assert_eq!(right, set(Decider::west(t)));
            assert!(right.is_subset(&left), "n={n} t={t}");
            assert!(left.is_subset(&oracle), "n={n} t={t}");
            if t <= 2 {
                assert_eq!(left, oracle);
            }
            if n >= t {
                assert!(BigUint::from(left.len()) >= lower_bound(n, t).unwrap());
            }
        }
    }
}

#[test]
fn greedy_subsumed_by_oracle_on_four_stacks() {
    for n in 0..=6 {
        for p in all_permutations(n).unwrap() {
            if run_greedy(&p, 4, Priority::Left).unwrap().sorted {
                assert!(sortable(&p, 4, Pruning::None).unwrap().is_some(), "{p}");
            }
        }
    }
}

#[test]
fn left_greedy_is_not_optimal_from_three_stacks() {
    let p = Permutation::new(vec![2, 5, 4, 1, 6, 7, 3]).unwrap();
    assert!(sortable(&p, 3, Pruning::None).unwrap().is_some());
    assert!(!run_greedy(&p, 3, Priority::Left).unwrap().sorted);
    let c7 = count_sortable(7, Decider::greedy_left(3), Workers(0))
        .unwrap()
        .count;
    let o7 = count_sortable(7, Decider::oracle(3), Workers(0))
        .unwrap()
        .count;
    assert!(c7 < o7);
}
