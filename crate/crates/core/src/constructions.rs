//! Generative constructions: inserting a new maximum, the named example
//! families, and the family behind the `t!(t+1)^(n-t)` lower bound.

use num_bigint::BigUint;
use thiserror::Error;

use crate::perm::{all_permutations, Permutation, Permutations};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("slot {slot} is outside 1..={max}")]
    SlotOutOfRange { slot: usize, max: usize },
    #[error("{family} is defined for t >= {min}, got t = {t}")]
    FamilyRange {
        family: &'static str,
        t: usize,
        min: usize,
    },
    #[error("need n >= {min} for t = {t}, got n = {n}")]
    LengthRange { n: usize, t: usize, min: usize },
    #[error("stack count must be at least 1, got {0}")]
    NoStacks(usize),
}

/// Inserts the value `n` (one more than the base length) at 1-based `slot`.
pub fn insert_max(base: &Permutation, slot: usize) -> Result<Permutation, ConstructionError> {
    let max = base.len() + 1;
    if slot == 0 || slot > max {
        return Err(ConstructionError::SlotOutOfRange { slot, max });
    }
    let mut values = base.values().to_vec();
    values.insert(slot - 1, max as u32);
    Ok(Permutation::new(values).expect("inserting the new maximum keeps a bijection"))
}

fn require_t(family: &'static str, t: usize, min: usize) -> Result<(), ConstructionError> {
    if t < min {
        Err(ConstructionError::FamilyRange { family, t, min })
    } else {
        Ok(())
    }
}

/// `(t+1) t … 3 2 (t+2) 1`
pub fn right_fail_family(t: usize) -> Result<Permutation, ConstructionError> {
    require_t("right_fail_family", t, 2)?;
    let t = t as u32;
    let mut values: Vec<u32> = (2..=t + 1).rev().collect();
    values.extend([t + 2, 1]);
    Ok(Permutation::new(values).expect("family member is a permutation"))
}

/// `2 5 4 1 6 7 … (t+4) 3`
pub fn left_fail_family(t: usize) -> Result<Permutation, ConstructionError> {
    require_t("left_fail_family", t, 3)?;
    let mut values = vec![2, 5, 4, 1];
    values.extend(6..=t as u32 + 4);
    values.push(3);
    Ok(Permutation::new(values).expect("family member is a permutation"))
}

/// `2 6 3 5 1 7 8 … (t+5) 4`
pub fn superpattern_family(t: usize) -> Result<Permutation, ConstructionError> {
    require_t("superpattern_family", t, 3)?;
    let mut values = vec![2, 6, 3, 5, 1];
    values.extend(7..=t as u32 + 5);
    values.push(4);
    Ok(Permutation::new(values).expect("family member is a permutation"))
}

/// `t! (t+1)^(n-t)`, exactly.
pub fn lower_bound(n: usize, t: usize) -> Result<BigUint, ConstructionError> {
    if t == 0 {
        return Err(ConstructionError::NoStacks(t));
    }
    if n < t {
        return Err(ConstructionError::LengthRange { n, t, min: t });
    }
    let factorial: BigUint = (1..=t as u64).product();
    Ok(factorial * BigUint::from(t as u64 + 1).pow((n - t) as u32))
}

/// The slots a new maximum may take in a permutation that is about to grow
/// to length `len`: the first `t` positions and the last.
fn growth_slots(len: usize, t: usize) -> impl Iterator<Item = usize> {
    (1..=t).chain(std::iter::once(len))
}

/// Every permutation of length `n` built from a length-`t + 1` seed by
/// inserting `t + 2, …, n` in turn, each into one of the first `t` slots or
/// the last one. Seeds come in lexicographic order; for each seed the
/// choices run like an odometer, earliest insertion most significant and
/// slots ascending.
#[derive(Debug, Clone)]
pub struct LowerBoundFamily {
    t: usize,
    seeds: Permutations,
    seed: Option<Permutation>,
    digits: Vec<usize>,
}

impl LowerBoundFamily {
    fn build(&self) -> Option<Permutation> {
        let mut p = self.seed.clone()?;
        for &d in &self.digits {
            let slot = growth_slots(p.len() + 1, self.t)
                .nth(d)
                .expect("digit below t + 1");
            p = insert_max(&p, slot).expect("growth slots are in range");
        }
        Some(p)
    }

    fn advance(&mut self) {
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d <= self.t {
                return;
            }
            *d = 0;
        }
        self.seed = self.seeds.next();
    }
}

impl Iterator for LowerBoundFamily {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let out = self.build()?;
        self.advance();
        Some(out)
    }
}

pub fn lower_bound_family(n: usize, t: usize) -> Result<LowerBoundFamily, ConstructionError> {
    if t == 0 {
        return Err(ConstructionError::NoStacks(t));
    }
    if n < t + 1 {
        return Err(ConstructionError::LengthRange { n, t, min: t + 1 });
    }
    let mut seeds =
        all_permutations(t + 1).map_err(|_| ConstructionError::LengthRange { n, t, min: t + 1 })?;
    let seed = seeds.next();
    Ok(LowerBoundFamily {
        t,
        seeds,
        seed,
        digits: vec![0; n - t - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{greedy_sorts, Priority};
    use crate::perm::contains_pattern;
    use std::collections::HashSet;

    fn p(values: &[u32]) -> Permutation {
        Permutation::new(values.to_vec()).unwrap()
    }

    #[test]
    fn insertion_examples() {
        assert_eq!(insert_max(&p(&[3, 2, 1]), 3).unwrap(), p(&[3, 2, 4, 1]));
        assert_eq!(insert_max(&p(&[]), 1).unwrap(), p(&[1]));
        assert_eq!(insert_max(&p(&[1, 2]), 3).unwrap(), p(&[1, 2, 3]));
        assert_eq!(
            insert_max(&p(&[6, 3, 7, 2, 4, 5, 1]), 2).unwrap(),
            p(&[6, 8, 3, 7, 2, 4, 5, 1])
        );
        assert_eq!(
            insert_max(&p(&[1, 2]), 4),
            Err(ConstructionError::SlotOutOfRange { slot: 4, max: 3 })
        );
        assert!(insert_max(&p(&[1]), 0).is_err());
    }

    #[test]
    fn named_families() {
        assert_eq!(right_fail_family(2).unwrap(), p(&[3, 2, 4, 1]));
        assert_eq!(right_fail_family(3).unwrap(), p(&[4, 3, 2, 5, 1]));
        assert_eq!(right_fail_family(4).unwrap(), p(&[5, 4, 3, 2, 6, 1]));
        assert!(right_fail_family(1).is_err());

        assert_eq!(left_fail_family(3).unwrap(), p(&[2, 5, 4, 1, 6, 7, 3]));
        assert_eq!(left_fail_family(4).unwrap(), p(&[2, 5, 4, 1, 6, 7, 8, 3]));
        assert_eq!(
            left_fail_family(5).unwrap(),
            p(&[2, 5, 4, 1, 6, 7, 8, 9, 3])
        );
        assert!(left_fail_family(2).is_err());

        assert_eq!(
            superpattern_family(3).unwrap(),
            p(&[2, 6, 3, 5, 1, 7, 8, 4])
        );
        assert_eq!(
            superpattern_family(4).unwrap(),
            p(&[2, 6, 3, 5, 1, 7, 8, 9, 4])
        );
        assert!(superpattern_family(2).is_err());
        for t in 3..=7 {
            assert!(contains_pattern(
                &superpattern_family(t).unwrap(),
                &left_fail_family(t).unwrap()
            ));
        }
    }

    #[test]
    fn bound_values() {
        assert_eq!(lower_bound(4, 2).unwrap(), BigUint::from(18u32));
        assert_eq!(lower_bound(8, 3).unwrap(), BigUint::from(6144u32));
        for t in 1..=6 {
            let fact: u64 = (1..=t as u64).product();
            assert_eq!(lower_bound(t, t).unwrap(), BigUint::from(fact));
        }
        assert!(lower_bound(2, 3).is_err());
        assert!(lower_bound(2, 0).is_err());
        // far outside 64 bits
        assert_eq!(
            lower_bound(60, 3).unwrap(),
            BigUint::from(6u32) * BigUint::from(4u32).pow(57)
        );
    }

    #[test]
    fn family_sizes_and_membership() {
        let three: HashSet<_> = lower_bound_family(3, 2).unwrap().collect();
        assert_eq!(three.len(), 6);

        let four: Vec<_> = lower_bound_family(4, 2).unwrap().collect();
        let distinct: HashSet<_> = four.iter().cloned().collect();
        assert_eq!(four.len(), 18);
        assert_eq!(distinct.len(), 18);
        assert!(four
            .iter()
            .all(|q| greedy_sorts(q, 2, Priority::Left).unwrap()));

        for t in 1..=4 {
            let fact: usize = (1..=t + 1).product();
            assert_eq!(lower_bound_family(t + 1, t).unwrap().count(), fact);
        }
        assert!(lower_bound_family(2, 2).is_err());
    }

    #[test]
    fn family_order_is_fixed() {
        let first: Vec<_> = lower_bound_family(4, 2).unwrap().take(3).collect();
        assert_eq!(
            first,
            vec![p(&[4, 1, 2, 3]), p(&[1, 4, 2, 3]), p(&[1, 2, 3, 4])]
        );
    }
}
