//! Exact 0/1 knapsack for the per-slot scheduling step.
//!
//! Capacities are small integers (a slot's shared pool plus lent floor
//! space), so an exact table over remaining capacity beats approximation
//! schemes. Ties between optimal subsets are broken deterministically: the
//! reconstruction scans items in index order and includes one whenever
//! inclusion still achieves the optimum, which yields the lexicographically
//! smallest index set (missing positions compare as infinity, so an item
//! whose inclusion costs nothing is included).

/// Chosen items and the value/weight they realize. `value` is the table's
/// own sum (items added in decreasing index order), so oracle comparisons
/// can demand bitwise equality.
#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackSelection {
    pub chosen: Vec<usize>,
    pub value: f64,
    pub weight: u64,
}

/// Maximizes the total value of a subset with total weight at most
/// `capacity`. Values must be nonnegative and finite; weights are expected
/// to be at least 1 (a zero-weight item is simply always included).
pub fn solve_knapsack(values: &[f64], weights: &[u64], capacity: u64) -> KnapsackSelection {
    assert_eq!(values.len(), weights.len(), "one weight per value");
    debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
    let n = values.len();

    let total: u64 = weights.iter().sum();
    if capacity >= total {
        // Everything fits; the sum is accumulated in the same order the
        // table would produce.
        let value = values.iter().rev().fold(0.0, |acc, &v| v + acc);
        return KnapsackSelection {
            chosen: (0..n).collect(),
            value,
            weight: total,
        };
    }

    let cap = capacity as usize;
    let width = cap + 1;
    // best[i * width + c]: optimal value over items i.. with capacity c.
    let mut best = vec![0.0f64; (n + 1) * width];
    for i in (0..n).rev() {
        let w = weights[i] as usize;
        for c in 0..width {
            let skip = best[(i + 1) * width + c];
            let cell = if w <= c {
                let take = values[i] + best[(i + 1) * width + (c - w)];
                if take >= skip {
                    take
                } else {
                    skip
                }
            } else {
                skip
            };
            best[i * width + c] = cell;
        }
    }

    let mut chosen = Vec::new();
    let mut weight = 0u64;
    let mut c = cap;
    for i in 0..n {
        let w = weights[i] as usize;
        if w <= c && values[i] + best[(i + 1) * width + (c - w)] >= best[(i + 1) * width + c] {
            chosen.push(i);
            weight += weights[i];
            c -= w;
        }
    }
    KnapsackSelection {
        chosen,
        value: best[cap],
        weight,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::reference_knapsack;
    use proptest::prelude::*;

    #[test]
    fn picks_value_pair_over_heavy_single() {
        let sel = solve_knapsack(&[3.0, 2.0, 2.0], &[5, 4, 4], 8);
        assert_eq!(sel.chosen, vec![1, 2]);
        assert_eq!(sel.value, 4.0);
        assert_eq!(sel.weight, 8);
    }

    #[test]
    fn zero_capacity_selects_nothing() {
        let sel = solve_knapsack(&[3.0, 2.0], &[1, 1], 0);
        assert!(sel.chosen.is_empty());
        assert_eq!(sel.value, 0.0);
    }

    #[test]
    fn ample_capacity_selects_everything() {
        let sel = solve_knapsack(&[3.0, 2.0, 2.0], &[5, 4, 4], 13);
        assert_eq!(sel.chosen, vec![0, 1, 2]);
        assert_eq!(sel.value, 3.0 + (2.0 + 2.0));
        assert_eq!(sel.weight, 13);
    }

    #[test]
    fn ties_prefer_lower_indices() {
        let sel = solve_knapsack(&[1.0, 1.0], &[1, 1], 1);
        assert_eq!(sel.chosen, vec![0]);
    }

    #[test]
    fn free_riders_are_included() {
        // A zero-value item that fits never hurts the optimum, and the
        // infinity-padded order prefers the larger set.
        let sel = solve_knapsack(&[0.0, 5.0], &[1, 2], 3);
        assert_eq!(sel.chosen, vec![0, 1]);
        assert_eq!(sel.value, 5.0);
    }

    #[test]
    fn empty_instance_is_empty_selection() {
        let sel = solve_knapsack(&[], &[], 7);
        assert!(sel.chosen.is_empty());
        assert_eq!(sel.value, 0.0);
        assert_eq!(sel.weight, 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn matches_exhaustive_search(
            items in proptest::collection::vec((0u32..100, 1u64..12), 1..10),
            capacity in 0u64..40,
        ) {
            let values: Vec<f64> = items.iter().map(|(v, _)| *v as f64 / 4.0).collect();
            let weights: Vec<u64> = items.iter().map(|(_, w)| *w).collect();
            let sel = solve_knapsack(&values, &weights, capacity);
            let (ref_set, ref_value) = reference_knapsack(&values, &weights, capacity);
            prop_assert_eq!(sel.chosen, ref_set);
            prop_assert_eq!(sel.value.to_bits(), ref_value.to_bits());
        }
    }
}
