//! Timing harness: solves generated instances over a grid of recipient
//! counts and records wall time and cancellation counts.

use std::io::{self, Write};
use std::time::Instant;

use allocflow_core::model::DEFAULT_COST_SCALE;
use allocflow_core::{solve, CycleRule, SolverConfig};

use crate::generate::{generate, slack_capacity, GenParams};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchGrid {
    pub treatments: usize,
    pub recipients: Vec<usize>,
    /// Uniform capacity; derived from `slack` when absent.
    pub capacity: Option<i64>,
    pub slack: f64,
    pub rules: Vec<CycleRule>,
    pub repetitions: usize,
    pub seed: u64,
    pub heterogeneity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub treatments: usize,
    pub recipients: usize,
    pub capacity: i64,
    pub rule: CycleRule,
    pub repetition: usize,
    pub seed: u64,
    pub iterations: usize,
    pub millis: f64,
    pub total: f64,
    /// Optimal flow cost in scaled units; equal across rules for a seed.
    pub cost: i64,
}

pub fn rule_name(rule: CycleRule) -> &'static str {
    match rule {
        CycleRule::BellmanFord => "bellman-ford",
        CycleRule::MinMean => "min-mean",
    }
}

/// Parses a comma-separated list of positive sizes.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>, String> {
    let sizes: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("bad size {s:?} in grid {text:?}")))
        .collect::<Result<_, _>>()?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(format!("grid {text:?} must list positive sizes"));
    }
    Ok(sizes)
}

/// Runs every (size, repetition, rule) cell. Repetition `r` uses seed
/// `seed + r`, shared by all rules so their objectives can be compared.
pub fn run(grid: &BenchGrid, mut progress: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>, String> {
    let mut rows = Vec::new();
    for &n2 in &grid.recipients {
        let capacity = grid.capacity.unwrap_or_else(|| slack_capacity(grid.treatments, n2, grid.slack));
        for repetition in 0..grid.repetitions {
            let seed = grid.seed + repetition as u64;
            let generated = generate(&GenParams {
                treatments: grid.treatments,
                recipients: n2,
                heterogeneity: grid.heterogeneity,
                seed,
            })?;
            let instance = generated
                .instance(vec![capacity; grid.treatments], DEFAULT_COST_SCALE)
                .map_err(|e| e.to_string())?;
            for &rule in &grid.rules {
                let start = Instant::now();
                let report = solve(&instance, &SolverConfig::with_rule(rule)).map_err(|e| e.to_string())?;
                let row = BenchRow {
                    treatments: grid.treatments,
                    recipients: n2,
                    capacity,
                    rule,
                    repetition,
                    seed,
                    iterations: report.iterations,
                    millis: start.elapsed().as_secs_f64() * 1e3,
                    total: report.value.total,
                    cost: report.cost,
                };
                progress(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "n1,n2,capacity,rule,rep,seed,iterations,millis,total,cost";

pub fn csv_line(row: &BenchRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{:.3},{},{}",
        row.treatments,
        row.recipients,
        row.capacity,
        rule_name(row.rule),
        row.repetition,
        row.seed,
        row.iterations,
        row.millis,
        row.total,
        row.cost
    )
}

pub fn write_csv(rows: &[BenchRow], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", csv_line(row))?;
    }
    Ok(())
}

/// Median time and iterations of one (size, rule) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub recipients: usize,
    pub rule: CycleRule,
    pub median_millis: f64,
    pub median_iterations: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn summarize(rows: &[BenchRow]) -> Vec<CellSummary> {
    let mut cells: Vec<(usize, CycleRule)> = Vec::new();
    for row in rows {
        if !cells.contains(&(row.recipients, row.rule)) {
            cells.push((row.recipients, row.rule));
        }
    }
    cells
        .into_iter()
        .map(|(recipients, rule)| {
            let cell: Vec<&BenchRow> = rows.iter().filter(|r| r.recipients == recipients && r.rule == rule).collect();
            CellSummary {
                recipients,
                rule,
                median_millis: median(cell.iter().map(|r| r.millis).collect()),
                median_iterations: median(cell.iter().map(|r| r.iterations as f64).collect()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_sizes("100, 200,400").unwrap(), vec![100, 200, 400]);
        assert!(parse_sizes("100,0").is_err());
        assert!(parse_sizes("a").is_err());
    }

    #[test]
    fn both_rules_reach_the_same_objective() {
        let grid = BenchGrid {
            treatments: 5,
            recipients: vec![20, 40],
            capacity: None,
            slack: 1.0,
            rules: vec![CycleRule::BellmanFord, CycleRule::MinMean],
            repetitions: 2,
            seed: 4,
            heterogeneity: 1.0,
        };
        let rows = run(&grid, |_| {}).unwrap();
        assert_eq!(rows.len(), 8);
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].seed, pair[1].seed);
            assert_eq!(pair[0].cost, pair[1].cost);
        }
        assert_eq!(summarize(&rows).len(), 4);
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 9);
    }
}
