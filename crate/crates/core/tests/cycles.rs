use std::cmp::Ordering;

use allocflow_core::solver::cycles::{cmp_fraction, BellmanFord, Karp};
use proptest::prelude::*;

fn graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, i64)>)> {
    (1usize..=7).prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n, 0..n, -8i64..=8), 0..=3 * n)))
}

/// Minimum mean over simple cycles as (cost, length).
fn brute_min_mean(n: usize, arcs: &[(usize, usize, i64)]) -> Option<(i64, i64)> {
    let mut best: Option<(i64, i64)> = None;
    let mut stack = vec![];
    for s in 0..n {
        stack.push((s, 0i64, 0i64, 1u32 << s));
        while let Some((v, cost, len, seen)) = stack.pop() {
            for &(t, h, c) in arcs {
                if t != v {
                    continue;
                }
                if h == s {
                    let cand = (cost + c, len + 1);
                    if best.is_none_or(|(bc, bl)| cmp_fraction(cand.0, cand.1, bc, bl) == Ordering::Less) {
                        best = Some(cand);
                    }
                } else if h > s && seen & (1 << h) == 0 {
                    stack.push((h, cost + c, len + 1, seen | (1 << h)));
                }
            }
        }
    }
    best
}

fn is_closed(arcs: &[(usize, usize, i64)], cycle: &[usize]) -> bool {
    !cycle.is_empty() && (0..cycle.len()).all(|p| arcs[cycle[p]].1 == arcs[cycle[(p + 1) % cycle.len()]].0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn karp_matches_enumeration((n, arcs) in graph()) {
        let want = brute_min_mean(n, &arcs).filter(|&(c, _)| c < 0);
        match (Karp::default().min_mean_cycle(n, &arcs, n), want) {
            (None, None) => {}
            (Some(cycle), Some((c, l))) => {
                prop_assert!(is_closed(&arcs, &cycle.arcs));
                prop_assert_eq!(cmp_fraction(cycle.cost, cycle.len() as i64, c, l), Ordering::Equal);
            }
            (got, want) => prop_assert!(false, "got {:?}, want {:?}", got, want),
        }
    }

    #[test]
    fn bellman_ford_finds_a_negative_cycle_iff_one_exists((n, arcs) in graph()) {
        let exists = brute_min_mean(n, &arcs).is_some_and(|(c, _)| c < 0);
        match BellmanFord::default().negative_cycle(n, &arcs) {
            Some(cycle) => {
                prop_assert!(exists);
                prop_assert!(is_closed(&arcs, &cycle.arcs));
                prop_assert!(cycle.cost < 0);
                prop_assert_eq!(cycle.cost, cycle.arcs.iter().map(|&a| arcs[a].2).sum::<i64>());
            }
            None => prop_assert!(!exists),
        }
    }

    #[test]
    fn fraction_order_matches_rationals(a in -1000i64..1000, b in 1i64..50, c in -1000i64..1000, d in 1i64..50) {
        prop_assert_eq!(cmp_fraction(a, b, c, d), (a * d).cmp(&(c * b)));
    }
}
