//! Greedy baseline: recipients are visited once, in a given order, and each
//! takes its best treatment among those not yet at capacity.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{feasibility_check, Allocation, ProblemInstance};

/// Greedy allocation visiting recipients in `order`.
///
/// Ties between treatments go to the lowest index. `order` must be a
/// permutation of `0..n2`.
pub fn greedy_allocate(instance: &ProblemInstance, order: &[usize]) -> Result<Allocation> {
    feasibility_check(instance).into_result()?;
    let n2 = instance.recipients();
    if order.len() != n2 {
        return Err(Error::RecipientCountMismatch { expected: n2, found: order.len() });
    }
    let mut remaining: Vec<i64> = instance.capacities().to_vec();
    let mut assignment = alloc::vec![usize::MAX; n2];
    for &i in order {
        if i >= n2 {
            return Err(Error::IndexOutOfRange { index: i, bound: n2 });
        }
        if assignment[i] != usize::MAX {
            return Err(Error::IndexOutOfRange { index: i, bound: n2 });
        }
        let mut best: Option<usize> = None;
        for (j, &y) in instance.row(i).iter().enumerate() {
            if remaining[j] > 0 && best.is_none_or(|b| y > instance.outcome(i, b)) {
                best = Some(j);
            }
        }
        // total capacity covers everyone, so some treatment is always open
        let j = best.expect("capacity checked up front");
        remaining[j] -= 1;
        assignment[i] = j;
    }
    Ok(Allocation::new(assignment))
}

/// Greedy allocation in recipient index order.
pub fn greedy_in_index_order(instance: &ProblemInstance) -> Result<Allocation> {
    let order: Vec<usize> = (0..instance.recipients()).collect();
    greedy_allocate(instance, &order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::allocation_value;
    use alloc::vec;

    fn inst(rows: &[&[f64]], caps: &[i64]) -> ProblemInstance {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        ProblemInstance::new(&rows, caps.to_vec(), 1).unwrap()
    }

    #[test]
    fn greedy_matches_optimum_when_preferences_differ() {
        let a = inst(&[&[5.0, 1.0], &[1.0, 5.0]], &[1, 1]);
        let g = greedy_allocate(&a, &[0, 1]).unwrap();
        assert_eq!(g.assignment, vec![0, 1]);
        assert_eq!(allocation_value(&a, &g).unwrap().total, 10.0);
    }

    #[test]
    fn greedy_falls_short_on_shared_favourite() {
        let a = inst(&[&[5.0, 4.0], &[5.0, 1.0]], &[1, 1]);
        let g = greedy_allocate(&a, &[0, 1]).unwrap();
        assert_eq!(g.assignment, vec![0, 1]);
        assert_eq!(allocation_value(&a, &g).unwrap().total, 6.0);
        // visiting recipient 1 first happens to find the optimum
        assert_eq!(greedy_allocate(&a, &[1, 0]).unwrap().assignment, vec![1, 0]);
    }

    #[test]
    fn single_treatment_takes_everyone() {
        let a = inst(&[&[3.0], &[-1.0], &[2.0]], &[3]);
        assert_eq!(greedy_in_index_order(&a).unwrap().assignment, vec![0, 0, 0]);
    }

    #[test]
    fn ties_go_to_lowest_treatment() {
        let a = inst(&[&[2.0, 2.0, 2.0]], &[1, 1, 1]);
        assert_eq!(greedy_in_index_order(&a).unwrap().assignment, vec![0]);
    }

    #[test]
    fn errors() {
        let a = inst(&[&[1.0], &[2.0]], &[1]);
        assert!(matches!(greedy_in_index_order(&a), Err(Error::Infeasible { .. })));
        let b = inst(&[&[1.0], &[2.0]], &[2]);
        assert!(greedy_allocate(&b, &[0]).is_err());
        assert!(greedy_allocate(&b, &[0, 0]).is_err());
        assert!(greedy_allocate(&b, &[0, 2]).is_err());
    }
}
