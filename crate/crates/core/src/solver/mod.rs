//! Minimum-cost feasible flows by cycle canceling, and the allocation solvers
//! built on them.
//!
//! Starting from a feasible integer flow, a negative residual cycle is found
//! and the flow is pushed around it by the cycle's bottleneck capacity, until
//! no negative cycle remains. Two selection rules are offered:
//!
//! * [`CycleRule::BellmanFord`]: any negative cycle, found by Bellman-Ford-Moore.
//! * [`CycleRule::MinMean`]: a cycle of minimum mean cost (Karp), which bounds
//!   the number of iterations polynomially independent of the costs.
//!
//! Costs are integers, so each cancellation lowers the cost by at least one
//! and the loop terminates under either rule. Starting flows and bottlenecks
//! are integral, so every intermediate flow is integral too.

pub mod cycles;
mod layered;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{allocation_value, feasibility_check, Allocation, AllocationValue, ProblemInstance};
use crate::network::{self, build_network, build_pareto_network, ArcKind, Flow, Network};

pub use cycles::{find_min_mean_cycle, find_negative_cycle, Cycle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CycleRule {
    BellmanFord,
    #[default]
    MinMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverConfig {
    pub rule: CycleRule,
    /// Stop with [`Error::IterationCapExceeded`] after this many cancellations.
    pub max_iterations: Option<usize>,
}

impl SolverConfig {
    pub fn with_rule(rule: CycleRule) -> Self {
        SolverConfig { rule, max_iterations: None }
    }
}

/// One canceled cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CancelEvent {
    pub iteration: usize,
    /// Residual arcs on the cycle.
    pub length: usize,
    /// Cycle cost in scaled units; always negative.
    pub cost: i64,
    /// Units pushed around the cycle.
    pub delta: i64,
}

/// Receives one [`CancelEvent`] per canceled cycle.
pub trait TraceSink {
    fn record(&mut self, event: CancelEvent);
}

impl<F: FnMut(CancelEvent)> TraceSink for F {
    fn record(&mut self, event: CancelEvent) {
        self(event)
    }
}

/// Discards trace events.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoTrace;

impl TraceSink for NoTrace {
    fn record(&mut self, _: CancelEvent) {}
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub allocation: Allocation,
    pub value: AllocationValue,
    pub iterations: usize,
    /// Worst-case shortfall of `value.total` against the true optimum, caused
    /// by rounding outcomes to integer costs.
    pub quantization_bound: f64,
    /// Minimum flow cost in scaled units.
    pub cost: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancelOutcome {
    pub flow: Flow,
    pub iterations: usize,
}

/// A feasible integer flow for an allocation network: recipients in index
/// order each take the lowest-indexed treatment that still has capacity and
/// an arc to them.
pub fn initial_feasible_flow(net: &Network) -> Result<Flow> {
    let layout = net.layout().ok_or(Error::NotLayered)?;
    let mut remaining: Vec<i64> = net.arcs()[..layout.treatments].iter().map(|a| a.upper).collect();
    let total: i64 = remaining.iter().sum();
    let infeasible = Error::Infeasible { capacity: total, recipients: layout.recipients };
    if total < layout.recipients as i64 {
        return Err(infeasible);
    }
    let mut assignment = Vec::with_capacity(layout.recipients);
    for i in 0..layout.recipients {
        let j = (0..layout.treatments)
            .find(|&j| remaining[j] > 0 && net.assign_arc(j, i).is_some())
            .ok_or_else(|| infeasible.clone())?;
        remaining[j] -= 1;
        assignment.push(j);
    }
    net.flow_from_allocation(&Allocation::new(assignment))
}

/// Reads the allocation off a feasible flow: each recipient gets the unique
/// treatment whose arc into it carries flow.
pub fn extract_allocation(net: &Network, flow: &Flow) -> Result<Allocation> {
    let layout = net.layout().ok_or(Error::NotLayered)?;
    if flow.values.len() != net.arcs().len() {
        return Err(Error::InfeasibleFlow);
    }
    let mut assignment = vec![usize::MAX; layout.recipients];
    for (a, &x) in flow.values.iter().enumerate() {
        if let Some(ArcKind::Assign { treatment, recipient }) = net.arc_kind(a) {
            match x {
                0 => {}
                1 if assignment[recipient] == usize::MAX => assignment[recipient] = treatment,
                _ => return Err(Error::MalformedFlow { recipient }),
            }
        }
    }
    if let Some(recipient) = assignment.iter().position(|&j| j == usize::MAX) {
        return Err(Error::MalformedFlow { recipient });
    }
    Ok(Allocation::new(assignment))
}

/// Cycle canceling on an arbitrary network, working directly on residual
/// networks.
pub fn cancel_cycles(net: &Network, start: Flow, config: &SolverConfig) -> Result<CancelOutcome> {
    cancel_cycles_traced(net, start, config, &mut NoTrace)
}

pub fn cancel_cycles_traced(
    net: &Network,
    start: Flow,
    config: &SolverConfig,
    trace: &mut dyn TraceSink,
) -> Result<CancelOutcome> {
    let mut flow = start;
    let mut iterations = 0;
    let mut karp = cycles::Karp::default();
    let mut bellman_ford = cycles::BellmanFord::default();
    loop {
        let res = network::residual(net, &flow)?;
        let arcs = res.cost_arcs();
        let cycle = match config.rule {
            CycleRule::BellmanFord => bellman_ford.negative_cycle(res.vertex_count, &arcs),
            CycleRule::MinMean => karp.min_mean_cycle(res.vertex_count, &arcs, res.vertex_count),
        };
        let Some(cycle) = cycle else { break };
        if config.max_iterations.is_some_and(|cap| iterations >= cap) {
            return Err(Error::IterationCapExceeded(iterations));
        }
        let delta = res.bottleneck(&cycle.arcs);
        flow.augment(&res, &cycle.arcs, delta);
        iterations += 1;
        trace.record(CancelEvent { iteration: iterations, length: cycle.len(), cost: cycle.cost, delta });
    }
    Ok(CancelOutcome { flow, iterations })
}

fn report(
    instance: &ProblemInstance,
    net: &Network,
    allocation: Allocation,
    iterations: usize,
) -> Result<SolveReport> {
    let value = allocation_value(instance, &allocation)?;
    let flow = net.flow_from_allocation(&allocation)?;
    debug_assert!(network::is_feasible(net, &flow));
    Ok(SolveReport {
        cost: network::flow_cost(net, &flow),
        allocation,
        value,
        iterations,
        quantization_bound: instance.quantization_bound(),
    })
}

/// An allocation of maximum total outcome (for the rounded costs).
pub fn solve(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveReport> {
    solve_traced(instance, config, &mut NoTrace)
}

pub fn solve_traced(
    instance: &ProblemInstance,
    config: &SolverConfig,
    trace: &mut dyn TraceSink,
) -> Result<SolveReport> {
    feasibility_check(instance).into_result()?;
    let net = build_network(instance)?;
    let start = extract_allocation(&net, &initial_feasible_flow(&net)?)?;
    let outcome = layered::cancel(&net, &start, config, trace)?;
    report(instance, &net, outcome.allocation, outcome.iterations)
}

/// The best allocation among those leaving no recipient worse off than
/// under `baseline`. Canceling starts from the baseline itself.
pub fn solve_pareto(instance: &ProblemInstance, baseline: &Allocation, config: &SolverConfig) -> Result<SolveReport> {
    solve_pareto_traced(instance, baseline, config, &mut NoTrace)
}

pub fn solve_pareto_traced(
    instance: &ProblemInstance,
    baseline: &Allocation,
    config: &SolverConfig,
    trace: &mut dyn TraceSink,
) -> Result<SolveReport> {
    let net = build_pareto_network(instance, baseline)?;
    let outcome = layered::cancel(&net, baseline, config, trace)?;
    report(instance, &net, outcome.allocation, outcome.iterations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{flow_cost, is_feasible, residual};
    use std::vec::Vec as StdVec;

    fn inst(rows: &[&[f64]], caps: &[i64]) -> ProblemInstance {
        let rows: StdVec<StdVec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        ProblemInstance::new(&rows, caps.to_vec(), 1).unwrap()
    }

    const RULES: [CycleRule; 2] = [CycleRule::BellmanFord, CycleRule::MinMean];

    #[test]
    fn initial_flow_examples() {
        let net = build_network(&inst(&[&[1.0, 2.0], &[3.0, 4.0]], &[1, 1])).unwrap();
        let flow = initial_feasible_flow(&net).unwrap();
        assert!(is_feasible(&net, &flow));
        assert_eq!(extract_allocation(&net, &flow).unwrap().assignment, vec![0, 1]);

        let net = build_network(&inst(&[&[1.0], &[2.0], &[3.0]], &[3])).unwrap();
        assert_eq!(extract_allocation(&net, &initial_feasible_flow(&net).unwrap()).unwrap().assignment, vec![0, 0, 0]);

        let net = build_network(&inst(&[&[1.0], &[2.0]], &[1])).unwrap();
        assert_eq!(initial_feasible_flow(&net).unwrap_err(), Error::Infeasible { capacity: 1, recipients: 2 });
    }

    #[test]
    fn initial_flow_on_pareto_network_with_forced_baseline() {
        let instance = inst(&[&[5.0, 4.0], &[5.0, 1.0]], &[1, 1]);
        let baseline = Allocation::new(vec![0, 1]);
        let net = build_pareto_network(&instance, &baseline).unwrap();
        let flow = initial_feasible_flow(&net).unwrap();
        assert_eq!(flow, net.flow_from_allocation(&baseline).unwrap());
    }

    #[test]
    fn extract_allocation_examples() {
        let instance = inst(&[&[1.0, 2.0], &[3.0, 4.0]], &[2, 2]);
        let net = build_network(&instance).unwrap();
        let flow = net.flow_from_allocation(&vec![1, 1].into()).unwrap();
        assert_eq!(extract_allocation(&net, &flow).unwrap().assignment, vec![1, 1]);

        let net1 = build_network(&inst(&[&[1.0], &[2.0]], &[2])).unwrap();
        assert_eq!(extract_allocation(&net1, &initial_feasible_flow(&net1).unwrap()).unwrap().assignment, vec![0, 0]);

        let mut broken = flow.clone();
        broken.values[net.assign_arc(1, 0).unwrap()] = 0;
        assert_eq!(extract_allocation(&net, &broken).unwrap_err(), Error::MalformedFlow { recipient: 0 });
        broken.values[net.assign_arc(0, 1).unwrap()] = 1;
        assert_eq!(extract_allocation(&net, &broken).unwrap_err(), Error::MalformedFlow { recipient: 1 });
    }

    #[test]
    fn cancel_from_optimal_start_does_nothing() {
        let instance = inst(&[&[5.0, 4.0], &[5.0, 1.0]], &[1, 1]);
        let net = build_network(&instance).unwrap();
        let start = net.flow_from_allocation(&vec![1, 0].into()).unwrap();
        for rule in RULES {
            let out = cancel_cycles(&net, start.clone(), &SolverConfig::with_rule(rule)).unwrap();
            assert_eq!(out.iterations, 0);
            assert_eq!(out.flow, start);
        }
    }

    #[test]
    fn one_cancellation_fixes_the_swap() {
        let instance = inst(&[&[5.0, 4.0], &[5.0, 1.0]], &[1, 1]);
        let net = build_network(&instance).unwrap();
        let start = net.flow_from_allocation(&vec![0, 1].into()).unwrap();
        for rule in RULES {
            let mut costs = StdVec::new();
            let mut sink = |e: CancelEvent| costs.push(e.cost);
            let out = cancel_cycles_traced(&net, start.clone(), &SolverConfig::with_rule(rule), &mut sink).unwrap();
            assert_eq!(out.iterations, 1);
            assert_eq!(extract_allocation(&net, &out.flow).unwrap().assignment, vec![1, 0]);
            assert_eq!(flow_cost(&net, &out.flow), -9);
            assert_eq!(costs, vec![-3]);
        }
    }

    #[test]
    fn iteration_cap_is_enforced() {
        let instance = inst(&[&[5.0, 4.0], &[5.0, 1.0]], &[1, 1]);
        let net = build_network(&instance).unwrap();
        let start = net.flow_from_allocation(&vec![0, 1].into()).unwrap();
        let config = SolverConfig { rule: CycleRule::MinMean, max_iterations: Some(0) };
        assert_eq!(cancel_cycles(&net, start, &config).unwrap_err(), Error::IterationCapExceeded(0));
        assert_eq!(solve_pareto(&instance, &vec![0, 1].into(), &config).unwrap().iterations, 0);
        assert!(solve(&instance, &config).is_err());
    }

    #[test]
    fn solve_examples() {
        for rule in RULES {
            let config = SolverConfig::with_rule(rule);
            let r = solve(&inst(&[&[5.0, 1.0], &[1.0, 5.0]], &[1, 1]), &config).unwrap();
            assert_eq!((r.allocation.assignment.clone(), r.value.total), (vec![0, 1], 10.0));
            let r = solve(&inst(&[&[5.0, 4.0], &[5.0, 1.0]], &[1, 1]), &config).unwrap();
            assert_eq!((r.allocation.assignment.clone(), r.value.total), (vec![1, 0], 9.0));
            assert_eq!(r.cost, -9);
            let r = solve(&inst(&[&[-7.5]], &[1]), &config).unwrap();
            assert_eq!((r.allocation.assignment.clone(), r.value.total), (vec![0], -7.5));
        }
    }

    #[test]
    fn solve_rejects_infeasible_and_handles_empty() {
        let config = SolverConfig::default();
        assert_eq!(
            solve(&inst(&[&[1.0], &[2.0]], &[1]), &config).unwrap_err(),
            Error::Infeasible { capacity: 1, recipients: 2 }
        );
        let empty = ProblemInstance::new(&[], vec![1, 1], 1).unwrap();
        let r = solve(&empty, &config).unwrap();
        assert!(r.allocation.is_empty());
        assert_eq!((r.value.total, r.iterations), (0.0, 0));
    }

    #[test]
    fn solve_pareto_examples() {
        let instance = inst(&[&[5.0, 4.0], &[5.0, 1.0]], &[1, 1]);
        for rule in RULES {
            let config = SolverConfig::with_rule(rule);
            let r = solve_pareto(&instance, &vec![0, 1].into(), &config).unwrap();
            assert_eq!((r.allocation.assignment.clone(), r.value.total), (vec![0, 1], 6.0));
            let r = solve_pareto(&instance, &vec![1, 0].into(), &config).unwrap();
            assert_eq!((r.allocation.assignment.clone(), r.value.total), (vec![1, 0], 9.0));
        }
        assert_eq!(
            solve_pareto(&instance, &vec![1, 1].into(), &SolverConfig::default()).unwrap_err(),
            Error::InfeasibleBaseline
        );
    }

    #[test]
    fn final_residual_has_no_negative_cycle() {
        let instance = inst(
            &[&[3.0, 1.0, 4.0], &[1.0, 5.0, 9.0], &[2.0, 6.0, 5.0], &[3.0, 5.0, 8.0], &[9.0, 7.0, 9.0]],
            &[2, 2, 1],
        );
        let net = build_network(&instance).unwrap();
        for rule in RULES {
            let r = solve(&instance, &SolverConfig::with_rule(rule)).unwrap();
            let flow = net.flow_from_allocation(&r.allocation).unwrap();
            assert!(is_feasible(&net, &flow));
            let res = residual(&net, &flow).unwrap();
            assert!(find_negative_cycle(&res).is_none());
            assert!(find_min_mean_cycle(&res).is_none());

            let generic = cancel_cycles(&net, initial_feasible_flow(&net).unwrap(), &SolverConfig::with_rule(rule)).unwrap();
            assert_eq!(flow_cost(&net, &generic.flow), r.cost);
        }
    }
}
