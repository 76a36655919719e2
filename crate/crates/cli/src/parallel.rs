//! Parallel permutation test. Replicate streams are fixed by
//! `(seed, replicate index)`, so the report equals the serial one.

use allocflow_core::stats::{avg_abs_difference_weighted, replicate_statistic, GroupedOutcomes, PermutationConfig, PermutationReport, Scratch};
use rayon::prelude::*;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "ALLOCFLOW_THREADS";

pub fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|&n| n > 0)
}

pub fn permutation_test(
    data: &GroupedOutcomes,
    config: &PermutationConfig,
    threads: Option<usize>,
) -> allocflow_core::Result<PermutationReport> {
    if config.replicates == 0 {
        return Err(allocflow_core::Error::NoReplicates);
    }
    let observed = avg_abs_difference_weighted(data, config.weighting)?;
    let run = || -> Vec<f64> {
        (0..config.replicates)
            .into_par_iter()
            .map_init(Scratch::default, |scratch, r| replicate_statistic(data, config, r, scratch))
            .collect()
    };
    let stats = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().map_or_else(|_| run(), |pool| pool.install(run)),
        None => run(),
    };
    PermutationReport::from_replicates(observed, &stats, config.seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_equals_serial() {
        let data = GroupedOutcomes::new(&[
            vec![vec![1.0, 2.0, 3.5], vec![0.5, 4.0], vec![2.0]],
            vec![vec![7.0, 1.0], vec![3.0, 3.0, 3.0]],
        ])
        .unwrap();
        let config = PermutationConfig::new(500, 77);
        let serial = allocflow_core::stats::permutation_test(&data, &config).unwrap();
        for threads in [None, Some(1), Some(3)] {
            assert_eq!(permutation_test(&data, &config, threads).unwrap(), serial);
        }
    }
}
