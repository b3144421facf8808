//! Lexicographic subset enumeration with running neighbourhood unions.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default budget for exhaustive checks, counted in subset evaluations.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        match acc.checked_mul((n - i) as u128) {
            Some(x) => acc = x / (i + 1) as u128,
            None => return u128::MAX,
        }
    }
    acc
}

pub(crate) fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::SizeLimitExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// Calls `f(subset, union)` for every `k`-subset of `items` in lexicographic
/// order, where `union` is the union of the closed-free neighbourhoods
/// `adj(x)` over the subset. Stops early when `f` returns false.
/// Returns false iff stopped early.
pub(crate) fn for_each_subset_with_union(
    g: &Graph,
    items: &[usize],
    k: usize,
    mut f: impl FnMut(&[usize], &FixedBitSet) -> bool,
) -> bool {
    let n = g.n();
    if k == 0 {
        return f(&[], &FixedBitSet::with_capacity(n));
    }
    if k > items.len() {
        return true;
    }
    let mut stack: Vec<FixedBitSet> = (0..=k).map(|_| FixedBitSet::with_capacity(n)).collect();
    let mut idx: Vec<usize> = Vec::with_capacity(k);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    recurse(g, items, k, 0, &mut idx, &mut chosen, &mut stack, &mut f)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    g: &Graph,
    items: &[usize],
    k: usize,
    start: usize,
    idx: &mut Vec<usize>,
    chosen: &mut Vec<usize>,
    stack: &mut Vec<FixedBitSet>,
    f: &mut impl FnMut(&[usize], &FixedBitSet) -> bool,
) -> bool {
    let depth = chosen.len();
    if depth == k {
        return f(chosen, &stack[depth]);
    }
    let remaining = k - depth;
    for i in start..=items.len() - remaining {
        let v = items[i];
        let (lo, hi) = stack.split_at_mut(depth + 1);
        hi[0].clone_from(&lo[depth]);
        hi[0].union_with(g.neighbor_bits(v));
        idx.push(i);
        chosen.push(v);
        let go = recurse(g, items, k, i + 1, idx, chosen, stack, f);
        idx.pop();
        chosen.pop();
        if !go {
            return false;
        }
    }
    true
}

/// Calls `f` for every `k`-subset of `items` in lexicographic order.
pub(crate) fn for_each_subset(items: &[usize], k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > items.len() {
        return true;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    loop {
        cur.clear();
        cur.extend(idx.iter().map(|&i| items[i]));
        if !f(&cur) {
            return false;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] < items.len() - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        if k == 0 {
            return true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(24, 12), 2_704_156);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn subsets_in_order() {
        let mut seen = Vec::new();
        for_each_subset(&[1, 2, 3, 4], 2, |s| {
            seen.push(s.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![1, 2]);
        assert_eq!(seen[5], vec![3, 4]);
        let mut count = 0;
        for_each_subset(&[1, 2, 3], 0, |s| {
            assert!(s.is_empty());
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn unions_match_direct() {
        let g = Graph::cycle(6);
        for_each_subset_with_union(&g, &[0, 1, 2, 3, 4, 5], 2, |s, u| {
            let mut direct = FixedBitSet::with_capacity(6);
            for &v in s {
                for &w in g.neighbors(v) {
                    direct.insert(w);
                }
            }
            assert_eq!(&direct, u);
            true
        });
    }
}
