//! Problem data and solution types shared by every other module.
//!
//! Outcomes are stored row-major: row `i` is recipient `i`, column `j` is
//! treatment `j`. Capacities are per treatment; a uniform capacity `m` is the
//! special case `m_j = m` for all `j`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default multiplier applied to outcomes before rounding to integer costs.
pub const DEFAULT_COST_SCALE: i64 = 1_000_000;

/// A validated allocation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    outcomes: Vec<f64>,
    recipients: usize,
    treatments: usize,
    capacities: Vec<i64>,
    cost_scale: i64,
}

/// Checks raw problem data, reporting the first violated invariant.
pub fn validate(rows: &[Vec<f64>], capacities: &[i64], cost_scale: i64) -> Result<()> {
    let treatments = rows.first().map_or(capacities.len(), Vec::len);
    for (row, entries) in rows.iter().enumerate() {
        if entries.len() != treatments {
            return Err(Error::NonRectangular { row, expected: treatments, found: entries.len() });
        }
    }
    for (recipient, entries) in rows.iter().enumerate() {
        if let Some(treatment) = entries.iter().position(|y| !y.is_finite()) {
            return Err(Error::NonFiniteOutcome { recipient, treatment });
        }
    }
    if capacities.len() != treatments {
        return Err(Error::CapacityLengthMismatch { expected: treatments, found: capacities.len() });
    }
    if let Some(treatment) = capacities.iter().position(|&m| m < 0) {
        return Err(Error::NegativeCapacity { treatment, value: capacities[treatment] });
    }
    if cost_scale < 1 {
        return Err(Error::InvalidCostScale(cost_scale));
    }
    Ok(())
}

impl ProblemInstance {
    /// Builds an instance from one row of outcomes per recipient.
    ///
    /// With no rows the number of treatments is taken from `capacities`.
    pub fn new(rows: &[Vec<f64>], capacities: Vec<i64>, cost_scale: i64) -> Result<Self> {
        validate(rows, &capacities, cost_scale)?;
        Ok(ProblemInstance {
            outcomes: rows.iter().flatten().copied().collect(),
            recipients: rows.len(),
            treatments: capacities.len(),
            capacities,
            cost_scale,
        })
    }

    /// Same capacity `m` for every treatment.
    pub fn with_uniform_capacity(rows: &[Vec<f64>], capacity: i64, cost_scale: i64) -> Result<Self> {
        let treatments = rows.first().map_or(0, Vec::len);
        Self::new(rows, vec![capacity; treatments], cost_scale)
    }

    pub fn recipients(&self) -> usize {
        self.recipients
    }

    pub fn treatments(&self) -> usize {
        self.treatments
    }

    pub fn capacities(&self) -> &[i64] {
        &self.capacities
    }

    pub fn cost_scale(&self) -> i64 {
        self.cost_scale
    }

    #[inline]
    pub fn outcome(&self, recipient: usize, treatment: usize) -> f64 {
        self.outcomes[recipient * self.treatments + treatment]
    }

    pub fn row(&self, recipient: usize) -> &[f64] {
        &self.outcomes[recipient * self.treatments..(recipient + 1) * self.treatments]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.recipients).map(move |i| self.row(i))
    }

    pub fn total_capacity(&self) -> i64 {
        self.capacities.iter().sum()
    }

    /// Returns a copy with `shift` added to every outcome.
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        let rows: Vec<Vec<f64>> = self.rows().map(|r| r.iter().map(|y| y + shift).collect()).collect();
        Self::new(&rows, self.capacities.clone(), self.cost_scale)
    }

    /// Returns a copy with different capacities.
    pub fn with_capacities(&self, capacities: Vec<i64>) -> Result<Self> {
        let rows: Vec<Vec<f64>> = self.rows().map(<[f64]>::to_vec).collect();
        Self::new(&rows, capacities, self.cost_scale)
    }

    /// Worst-case gap between the optimum of the rounded costs and the true
    /// optimum total.
    pub fn quantization_bound(&self) -> f64 {
        self.recipients as f64 * 0.5 / self.cost_scale as f64
    }
}

/// Outcome of the capacity test: an allocation exists iff `sum_j m_j >= n2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible { capacity: i64, recipients: usize },
}

impl Feasibility {
    pub fn is_feasible(self) -> bool {
        matches!(self, Feasibility::Feasible)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            Feasibility::Feasible => Ok(()),
            Feasibility::Infeasible { capacity, recipients } => Err(Error::Infeasible { capacity, recipients }),
        }
    }
}

pub fn feasibility_check(instance: &ProblemInstance) -> Feasibility {
    let capacity = instance.total_capacity();
    let recipients = instance.recipients();
    if capacity >= recipients as i64 {
        Feasibility::Feasible
    } else {
        Feasibility::Infeasible { capacity, recipients }
    }
}

/// Treatment index per recipient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Allocation {
    pub assignment: Vec<usize>,
}

impl Allocation {
    pub fn new(assignment: Vec<usize>) -> Self {
        Allocation { assignment }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Number of recipients on each treatment.
    pub fn loads(&self, treatments: usize) -> Result<Vec<i64>> {
        let mut loads = vec![0i64; treatments];
        for &j in &self.assignment {
            *loads.get_mut(j).ok_or(Error::IndexOutOfRange { index: j, bound: treatments })? += 1;
        }
        Ok(loads)
    }

    /// Checks shape, index range and capacities against `instance`.
    pub fn check(&self, instance: &ProblemInstance) -> Result<()> {
        if self.len() != instance.recipients() {
            return Err(Error::RecipientCountMismatch { expected: instance.recipients(), found: self.len() });
        }
        let loads = self.loads(instance.treatments())?;
        for (treatment, (&assigned, &capacity)) in loads.iter().zip(instance.capacities()).enumerate() {
            if assigned > capacity {
                return Err(Error::CapacityViolated { treatment, assigned, capacity });
            }
        }
        Ok(())
    }

    /// Whether no recipient is worse off than under `baseline`.
    pub fn dominates(&self, baseline: &Allocation, instance: &ProblemInstance) -> bool {
        self.assignment
            .iter()
            .zip(&baseline.assignment)
            .enumerate()
            .all(|(i, (&new, &old))| instance.outcome(i, new) >= instance.outcome(i, old))
    }
}

impl From<Vec<usize>> for Allocation {
    fn from(assignment: Vec<usize>) -> Self {
        Allocation { assignment }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationValue {
    pub total: f64,
    pub mean: f64,
}

impl AllocationValue {
    pub fn from_total(total: f64, recipients: usize) -> Self {
        let mean = if recipients == 0 { 0.0 } else { total / recipients as f64 };
        AllocationValue { total, mean }
    }
}

pub fn allocation_value(instance: &ProblemInstance, alloc: &Allocation) -> Result<AllocationValue> {
    alloc.check(instance)?;
    let total = alloc.assignment.iter().enumerate().map(|(i, &j)| instance.outcome(i, j)).sum();
    Ok(AllocationValue::from_total(total, instance.recipients()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(rows: &[&[f64]], caps: &[i64]) -> ProblemInstance {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        ProblemInstance::new(&rows, caps.to_vec(), 1).unwrap()
    }

    #[test]
    fn validate_accepts_square_instance() {
        assert_eq!(validate(&[vec![1.0, 2.0], vec![3.0, 4.0]], &[1, 1], 1), Ok(()));
    }

    #[test]
    fn validate_errors() {
        assert_eq!(
            validate(&[vec![1.0, f64::NAN], vec![3.0, 4.0]], &[1, 1], 1),
            Err(Error::NonFiniteOutcome { recipient: 0, treatment: 1 })
        );
        assert_eq!(
            validate(&[vec![1.0, 2.0], vec![3.0, 4.0]], &[1, 1, 1], 1),
            Err(Error::CapacityLengthMismatch { expected: 2, found: 3 })
        );
        assert_eq!(
            validate(&[vec![1.0, 2.0], vec![3.0]], &[1, 1], 1),
            Err(Error::NonRectangular { row: 1, expected: 2, found: 1 })
        );
        assert_eq!(
            validate(&[vec![1.0, 2.0]], &[1, -1], 1),
            Err(Error::NegativeCapacity { treatment: 1, value: -1 })
        );
        assert_eq!(validate(&[vec![1.0]], &[1], 0), Err(Error::InvalidCostScale(0)));
        assert!(validate(&[vec![f64::INFINITY]], &[1], 1).is_err());
    }

    #[test]
    fn feasibility_examples() {
        assert!(!feasibility_check(&inst(&[&[1.0], &[2.0]], &[1])).is_feasible());
        assert!(feasibility_check(&inst(&[&[1.0, 0.0], &[2.0, 0.0]], &[1, 1])).is_feasible());
        let five: Vec<&[f64]> = (0..5).map(|_| &[0.0, 0.0, 1.0][..]).collect();
        assert!(feasibility_check(&inst(&five, &[0, 0, 5])).is_feasible());
    }

    #[test]
    fn empty_instance_is_feasible_with_zero_value() {
        let instance = ProblemInstance::new(&[], vec![2, 1], 1).unwrap();
        assert_eq!(instance.treatments(), 2);
        assert!(feasibility_check(&instance).is_feasible());
        let value = allocation_value(&instance, &Allocation::default()).unwrap();
        assert_eq!((value.total, value.mean), (0.0, 0.0));
    }

    #[test]
    fn allocation_value_examples() {
        let a = inst(&[&[5.0, 1.0], &[1.0, 5.0]], &[1, 1]);
        let v = allocation_value(&a, &vec![0, 1].into()).unwrap();
        assert_eq!((v.total, v.mean), (10.0, 5.0));

        let b = inst(&[&[5.0, 4.0], &[5.0, 1.0]], &[1, 1]);
        assert_eq!(allocation_value(&b, &vec![1, 0].into()).unwrap().total, 9.0);

        let c = inst(&[&[-2.75]], &[1]);
        assert_eq!(allocation_value(&c, &vec![0].into()).unwrap().total, -2.75);
    }

    #[test]
    fn allocation_value_rejects_bad_allocations() {
        let a = inst(&[&[5.0, 1.0], &[1.0, 5.0]], &[1, 1]);
        assert_eq!(
            allocation_value(&a, &vec![0, 0].into()),
            Err(Error::CapacityViolated { treatment: 0, assigned: 2, capacity: 1 })
        );
        assert_eq!(allocation_value(&a, &vec![0, 2].into()), Err(Error::IndexOutOfRange { index: 2, bound: 2 }));
    }

    #[test]
    fn raising_a_capacity_keeps_feasibility() {
        let a = inst(&[&[1.0, 2.0], &[1.0, 2.0], &[3.0, 4.0]], &[2, 1]);
        assert!(feasibility_check(&a).is_feasible());
        for j in 0..2 {
            let mut caps = a.capacities().to_vec();
            caps[j] += 1;
            assert!(feasibility_check(&a.with_capacities(caps).unwrap()).is_feasible());
        }
    }
}
