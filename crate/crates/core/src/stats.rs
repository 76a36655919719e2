//! Heterogeneity of arm means within groups, its permutation test, and the
//! side-by-side comparison of allocation mechanisms.
//!
//! Within each group every arm gets the mean of its observations, and the
//! statistic averages `|mean_a - mean_b|` over all distinct arm pairs. The
//! permutation test shuffles observations within each group while keeping
//! every arm's size, which is the null of arms not mattering once the group
//! is fixed.
//!
//! # Random streams
//!
//! Replicate `r` under seed `s` draws from `ChaCha8Rng::seed_from_u64(s)`
//! switched to stream `r`, and shuffles groups in order with a Fisher-Yates
//! shuffle. A report therefore depends only on the data, the seed and the
//! replicate count, whether replicates run serially or in parallel.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::heuristic::greedy_allocate;
use crate::model::{allocation_value, Allocation, AllocationValue, ProblemInstance};
use crate::solver::{solve, solve_pareto, SolverConfig};

/// Relative slack under which a replicate statistic counts as equal to the
/// observed one; absorbs summation-order rounding.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Observations of one group, stored arm by arm.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    sizes: Vec<usize>,
    values: Vec<f64>,
}

impl Group {
    pub fn new(arms: &[Vec<f64>]) -> Option<Self> {
        if arms.is_empty() || arms.iter().any(Vec::is_empty) {
            return None;
        }
        Some(Group { sizes: arms.iter().map(Vec::len).collect(), values: arms.iter().flatten().copied().collect() })
    }

    pub fn arm_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupedOutcomes {
    groups: Vec<Group>,
}

impl GroupedOutcomes {
    /// `groups[g][a]` holds the observations of arm `a` in group `g`.
    pub fn new(groups: &[Vec<Vec<f64>>]) -> Result<Self> {
        let groups = groups
            .iter()
            .enumerate()
            .map(|(g, arms)| Group::new(arms).ok_or(Error::EmptyGroup { group: g }))
            .collect::<Result<_>>()?;
        Ok(GroupedOutcomes { groups })
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    fn pair_count(&self) -> usize {
        self.groups.iter().map(|g| g.arm_count() * (g.arm_count() - 1) / 2).sum()
    }
}

/// How arm pairs from different groups are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Every arm pair counts once.
    #[default]
    Pair,
    /// Pairs are averaged within each group first, then groups equally.
    Group,
}

/// `(sum of |mean_a - mean_b|, number of pairs)` for one group's values laid
/// out arm by arm.
fn pair_differences(sizes: &[usize], values: &[f64], means: &mut Vec<f64>) -> (f64, usize) {
    means.clear();
    let mut offset = 0;
    for &size in sizes {
        let sum: f64 = values[offset..offset + size].iter().sum();
        means.push(sum / size as f64);
        offset += size;
    }
    let mut total = 0.0;
    for a in 0..means.len() {
        for b in a + 1..means.len() {
            total += (means[a] - means[b]).abs();
        }
    }
    (total, means.len() * (means.len() - 1) / 2)
}

fn combine(parts: impl Iterator<Item = (f64, usize)>, weighting: Weighting) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for (s, pairs) in parts.filter(|&(_, p)| p > 0) {
        match weighting {
            Weighting::Pair => {
                sum += s;
                count += pairs;
            }
            Weighting::Group => {
                sum += s / pairs as f64;
                count += 1;
            }
        }
    }
    sum / count as f64
}

/// Average absolute difference between arm means over all within-group pairs.
pub fn avg_abs_difference(data: &GroupedOutcomes) -> Result<f64> {
    avg_abs_difference_weighted(data, Weighting::Pair)
}

pub fn avg_abs_difference_weighted(data: &GroupedOutcomes, weighting: Weighting) -> Result<f64> {
    if data.pair_count() == 0 {
        return Err(Error::NoPairs);
    }
    let mut means = Vec::new();
    Ok(combine(data.groups.iter().map(|g| pair_differences(&g.sizes, &g.values, &mut means)), weighting))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationConfig {
    pub replicates: usize,
    pub seed: u64,
    pub weighting: Weighting,
}

impl PermutationConfig {
    pub fn new(replicates: usize, seed: u64) -> Self {
        PermutationConfig { replicates, seed, weighting: Weighting::Pair }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationReport {
    pub observed: f64,
    /// Observed statistic minus the mean replicate statistic.
    pub excess: f64,
    /// Share of replicates at least as large as the observed statistic.
    pub p_value: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl PermutationReport {
    pub fn from_replicates(observed: f64, replicates: &[f64], seed: u64) -> Result<Self> {
        if replicates.is_empty() {
            return Err(Error::NoReplicates);
        }
        let n = replicates.len() as f64;
        let threshold = observed - TIE_TOLERANCE * observed.abs().max(1.0);
        let extreme = replicates.iter().filter(|&&s| s >= threshold).count();
        let mean = replicates.iter().sum::<f64>() / n;
        Ok(PermutationReport {
            observed,
            excess: observed - mean,
            p_value: extreme as f64 / n,
            replicates: replicates.len(),
            seed,
        })
    }
}

/// Scratch space for [`replicate_statistic`].
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    values: Vec<f64>,
    means: Vec<f64>,
}

/// The statistic of permutation replicate `replicate` under `config.seed`.
pub fn replicate_statistic(
    data: &GroupedOutcomes,
    config: &PermutationConfig,
    replicate: usize,
    scratch: &mut Scratch,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(replicate as u64);
    let Scratch { values, means } = scratch;
    let parts = data.groups.iter().map(|g| {
        values.clear();
        values.extend_from_slice(&g.values);
        values.shuffle(&mut rng);
        pair_differences(&g.sizes, values, means)
    });
    // collected first: `combine` must not interleave with the rng draws
    let parts: Vec<(f64, usize)> = parts.collect();
    combine(parts.into_iter(), config.weighting)
}

/// Permutation test of the average absolute difference, run serially.
pub fn permutation_test(data: &GroupedOutcomes, config: &PermutationConfig) -> Result<PermutationReport> {
    if config.replicates == 0 {
        return Err(Error::NoReplicates);
    }
    let observed = avg_abs_difference_weighted(data, config.weighting)?;
    let mut scratch = Scratch::default();
    let stats: Vec<f64> =
        (0..config.replicates).map(|r| replicate_statistic(data, config, r, &mut scratch)).collect();
    PermutationReport::from_replicates(observed, &stats, config.seed)
}

/// Holm-Sidak step-down adjustment of a family of p-values, returned in the
/// input order.
pub fn holm_sidak(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    let mut adjusted = alloc::vec![0.0; m];
    let mut running: f64 = 0.0;
    for (rank, &idx) in order.iter().enumerate() {
        let p = p_values[idx].clamp(0.0, 1.0);
        let step = 1.0 - libm::pow(1.0 - p, (m - rank) as f64);
        running = running.max(step);
        adjusted[idx] = running.min(1.0);
    }
    adjusted
}

/// Value of the same instance under four allocation mechanisms.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismReport {
    pub actual: AllocationValue,
    pub greedy: AllocationValue,
    pub optimal: AllocationValue,
    pub pareto_optimal: AllocationValue,
}

/// Evaluates the actual allocation, greedy reallocation in `order`, the
/// optimal allocation and the best Pareto improvement over `actual`.
pub fn compare_mechanisms(
    instance: &ProblemInstance,
    actual: &Allocation,
    order: &[usize],
    config: &SolverConfig,
) -> Result<MechanismReport> {
    let actual_value = allocation_value(instance, actual).map_err(|_| Error::InfeasibleBaseline)?;
    let greedy = greedy_allocate(instance, order)?;
    let optimal = solve(instance, config)?;
    let pareto = solve_pareto(instance, actual, config)?;
    Ok(MechanismReport {
        actual: actual_value,
        greedy: allocation_value(instance, &greedy)?,
        optimal: optimal.value,
        pareto_optimal: pareto.value,
    })
}
