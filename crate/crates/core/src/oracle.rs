//! Exhaustive reference solvers for small instances.
//!
//! Candidates are enumerated depth-first in lexicographic order with
//! capacity pruning; the first maximizer found is kept, so ties resolve to
//! the lexicographically smallest assignment.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{feasibility_check, Allocation, AllocationValue, ProblemInstance};

/// Default limit on `n1^n2` candidate assignments.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

pub fn brute_force_optimal(instance: &ProblemInstance) -> Result<(Allocation, AllocationValue)> {
    brute_force_with(instance, DEFAULT_ENUMERATION_CAP, |_, _| true)
}

/// Best allocation that keeps every recipient at or above its baseline outcome.
pub fn brute_force_pareto(
    instance: &ProblemInstance,
    baseline: &Allocation,
) -> Result<(Allocation, AllocationValue)> {
    baseline.check(instance).map_err(|_| Error::InfeasibleBaseline)?;
    let floor: Vec<f64> = baseline.assignment.iter().enumerate().map(|(i, &j)| instance.outcome(i, j)).collect();
    brute_force_with(instance, DEFAULT_ENUMERATION_CAP, |i, j| instance.outcome(i, j) >= floor[i])
}

/// Enumerates allocations whose every (recipient, treatment) pair passes `allowed`.
pub fn brute_force_with(
    instance: &ProblemInstance,
    cap: u128,
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<(Allocation, AllocationValue)> {
    let (n1, n2) = (instance.treatments(), instance.recipients());
    let candidates = (n1 as u128).checked_pow(n2 as u32).unwrap_or(u128::MAX);
    if candidates > cap {
        return Err(Error::TooLarge { candidates, cap });
    }
    feasibility_check(instance).into_result()?;

    let mut search = Search {
        instance,
        allowed: &allowed,
        remaining: instance.capacities().to_vec(),
        current: vec![0; n2],
        best: None,
    };
    search.descend(0, 0.0);
    let (assignment, total) = search.best.ok_or(Error::Infeasible {
        capacity: instance.total_capacity(),
        recipients: n2,
    })?;
    Ok((Allocation::new(assignment), AllocationValue::from_total(total, n2)))
}

struct Search<'a, F> {
    instance: &'a ProblemInstance,
    allowed: &'a F,
    remaining: Vec<i64>,
    current: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
}

impl<F: Fn(usize, usize) -> bool> Search<'_, F> {
    fn descend(&mut self, i: usize, total: f64) {
        if i == self.current.len() {
            if self.best.as_ref().is_none_or(|(_, b)| total > *b) {
                self.best = Some((self.current.clone(), total));
            }
            return;
        }
        for j in 0..self.instance.treatments() {
            if self.remaining[j] == 0 || !(self.allowed)(i, j) {
                continue;
            }
            self.remaining[j] -= 1;
            self.current[i] = j;
            self.descend(i + 1, total + self.instance.outcome(i, j));
            self.remaining[j] += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(rows: &[&[f64]], caps: &[i64]) -> ProblemInstance {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        ProblemInstance::new(&rows, caps.to_vec(), 1).unwrap()
    }

    #[test]
    fn optimal_examples() {
        let (a, v) = brute_force_optimal(&inst(&[&[5.0, 4.0], &[5.0, 1.0]], &[1, 1])).unwrap();
        assert_eq!((a.assignment, v.total, v.mean), (vec![1, 0], 9.0, 4.5));

        let (a, v) = brute_force_optimal(&ProblemInstance::new(&[], vec![1], 1).unwrap()).unwrap();
        assert!(a.is_empty());
        assert_eq!(v.total, 0.0);

        let (a, _) = brute_force_optimal(&inst(&[&[1.0, 3.0, 2.0], &[4.0, 0.0, 4.0], &[0.0, 0.0, 1.0]], &[3, 3, 3])).unwrap();
        assert_eq!(a.assignment, vec![1, 0, 2]);
    }

    #[test]
    fn pareto_examples() {
        let instance = inst(&[&[5.0, 4.0], &[5.0, 1.0]], &[1, 1]);
        let (a, v) = brute_force_pareto(&instance, &vec![0, 1].into()).unwrap();
        assert_eq!((a.assignment, v.total), (vec![0, 1], 6.0));
        let (a, v) = brute_force_pareto(&instance, &vec![1, 0].into()).unwrap();
        assert_eq!((a.assignment, v.total), (vec![1, 0], 9.0));

        let flat = inst(&[&[2.0, 2.0], &[3.0, 3.0]], &[1, 1]);
        assert_eq!(brute_force_pareto(&flat, &vec![1, 0].into()).unwrap(), brute_force_optimal(&flat).unwrap());
        assert_eq!(brute_force_pareto(&instance, &vec![0, 0].into()).unwrap_err(), Error::InfeasibleBaseline);
    }

    #[test]
    fn limits() {
        let rows: Vec<Vec<f64>> = (0..24).map(|_| vec![0.0; 2]).collect();
        let big = ProblemInstance::new(&rows, vec![24, 24], 1).unwrap();
        assert!(matches!(brute_force_optimal(&big), Err(Error::TooLarge { .. })));
        assert!(matches!(brute_force_optimal(&inst(&[&[1.0], &[1.0]], &[1])), Err(Error::Infeasible { .. })));
    }
}
