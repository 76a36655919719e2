//! Text and JSON renderings of solver, comparison and permutation reports.
//!
//! JSON field names are part of the command-line contract:
//!
//! * allocation: `assignment, total, mean, iterations, quantization_bound`
//! * Pareto allocation: the allocation fields plus `baseline_total`, `delta`
//! * comparison: `recipients, actual, greedy, optimal, pareto_optimal` (means)
//! * permutation test: `observed, excess, p_value, replicates, seed`

use std::fmt::Write as _;

use allocflow_core::stats::{MechanismReport, PermutationReport};
use allocflow_core::SolveReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationJson {
    pub assignment: Vec<usize>,
    pub total: f64,
    pub mean: f64,
    pub iterations: usize,
    pub quantization_bound: f64,
}

impl From<&SolveReport> for AllocationJson {
    fn from(r: &SolveReport) -> Self {
        AllocationJson {
            assignment: r.allocation.assignment.clone(),
            total: r.value.total,
            mean: r.value.mean,
            iterations: r.iterations,
            quantization_bound: r.quantization_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoJson {
    #[serde(flatten)]
    pub allocation: AllocationJson,
    pub baseline_total: f64,
    /// Per-recipient gain over the baseline outcome; never negative.
    pub delta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareJson {
    pub recipients: usize,
    pub actual: f64,
    pub greedy: f64,
    pub optimal: f64,
    pub pareto_optimal: f64,
}

impl CompareJson {
    pub fn new(report: &MechanismReport, recipients: usize) -> Self {
        CompareJson {
            recipients,
            actual: report.actual.mean,
            greedy: report.greedy.mean,
            optimal: report.optimal.mean,
            pareto_optimal: report.pareto_optimal.mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationJson {
    pub observed: f64,
    pub excess: f64,
    pub p_value: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl From<&PermutationReport> for PermutationJson {
    fn from(r: &PermutationReport) -> Self {
        PermutationJson { observed: r.observed, excess: r.excess, p_value: r.p_value, replicates: r.replicates, seed: r.seed }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn allocation_text(a: &AllocationJson) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "assignment: {}", join(&a.assignment));
    let _ = writeln!(s, "total: {}", a.total);
    let _ = writeln!(s, "mean: {}", a.mean);
    let _ = writeln!(s, "iterations: {}", a.iterations);
    let _ = writeln!(s, "quantization_bound: {}", a.quantization_bound);
    s
}

pub fn pareto_text(p: &ParetoJson) -> String {
    let mut s = allocation_text(&p.allocation);
    let _ = writeln!(s, "baseline_total: {}", p.baseline_total);
    let _ = writeln!(s, "delta: {}", join(&p.delta));
    s
}

pub fn compare_text(c: &CompareJson) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<16}{:>16}", "mechanism", "mean");
    for (name, mean) in [
        ("actual", c.actual),
        ("greedy", c.greedy),
        ("optimal", c.optimal),
        ("pareto_optimal", c.pareto_optimal),
    ] {
        let _ = writeln!(s, "{name:<16}{mean:>16.6}");
    }
    let _ = writeln!(s, "{:<16}{:>16}", "recipients", c.recipients);
    s
}

pub fn permutation_text(p: &PermutationJson) -> String {
    format!(
        "observed: {}\nexcess: {}\np_value: {}\nreplicates: {}\nseed: {}\n",
        p.observed, p.excess, p.p_value, p.replicates, p.seed
    )
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_json_fields_are_exact() {
        let p = PermutationJson { observed: 4.0, excess: 1.5, p_value: 0.1, replicates: 10, seed: 7 };
        let v: serde_json::Value = serde_json::from_str(&to_json(&p)).unwrap();
        let mut keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        keys.sort();
        assert_eq!(keys, ["excess", "observed", "p_value", "replicates", "seed"]);
        assert_eq!(permutation_text(&p), "observed: 4\nexcess: 1.5\np_value: 0.1\nreplicates: 10\nseed: 7\n");
    }

    #[test]
    fn pareto_json_is_flat() {
        let p = ParetoJson {
            allocation: AllocationJson { assignment: vec![0, 1], total: 6.0, mean: 3.0, iterations: 0, quantization_bound: 1e-6 },
            baseline_total: 6.0,
            delta: vec![0.0, 0.0],
        };
        let v: serde_json::Value = serde_json::from_str(&to_json(&p)).unwrap();
        assert_eq!(v["assignment"], serde_json::json!([0, 1]));
        assert_eq!(v["delta"], serde_json::json!([0.0, 0.0]));
    }
}
