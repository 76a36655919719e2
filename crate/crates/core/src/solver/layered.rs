//! Cycle canceling specialised to allocation networks.
//!
//! In the residual network of an allocation flow every recipient has exactly
//! one outgoing arc (back to its current treatment) and the sink is cut off,
//! so a residual cycle alternates treatments with either the source or a
//! recipient. The search therefore runs on a compact graph: the source, the
//! treatments, and one middle vertex per ordered treatment pair `(j, k)`
//! standing for the cheapest recipient that could move from `k` to `j`. Arc
//! counts are preserved (two per move), so cycle costs and means are the same
//! as in the full residual network.

use alloc::vec;
use alloc::vec::Vec;

use super::cycles::{BellmanFord, Karp};
use super::{CancelEvent, CycleRule, SolverConfig, TraceSink};
use crate::error::{Error, Result};
use crate::model::Allocation;
use crate::network::{ArcKind, Network};

#[derive(Debug, Clone, Copy)]
enum Step {
    Source,
    Move { recipient: usize, from: usize, to: usize },
    Exit,
}

pub(crate) struct Outcome {
    pub allocation: Allocation,
    pub iterations: usize,
}

struct Compact {
    arcs: Vec<(usize, usize, i64)>,
    steps: Vec<Step>,
    vertex_count: usize,
    best: Vec<(i64, usize)>,
}

pub(crate) fn cancel(
    net: &Network,
    start: &Allocation,
    config: &SolverConfig,
    trace: &mut dyn TraceSink,
) -> Result<Outcome> {
    let layout = net.layout().ok_or(Error::NotLayered)?;
    let (n1, n2) = (layout.treatments, layout.recipients);

    // profit[i * n1 + j] = -cost of arc j -> i, None when the arc is absent
    let mut profit: Vec<Option<i64>> = vec![None; n1 * n2];
    let mut capacity = vec![0i64; n1];
    for (a, arc) in net.arcs().iter().enumerate() {
        match net.arc_kind(a) {
            Some(ArcKind::Source { treatment }) => capacity[treatment] = arc.upper,
            Some(ArcKind::Assign { treatment, recipient }) => profit[recipient * n1 + treatment] = Some(-arc.cost),
            _ => {}
        }
    }

    let mut assignment = start.assignment.clone();
    let mut load = start.loads(n1)?;
    for (i, &j) in assignment.iter().enumerate() {
        if profit[i * n1 + j].is_none() {
            return Err(Error::InfeasibleFlow);
        }
    }
    if load.iter().zip(&capacity).any(|(l, c)| l > c) {
        return Err(Error::InfeasibleFlow);
    }

    let mut compact = Compact { arcs: Vec::new(), steps: Vec::new(), vertex_count: 0, best: Vec::new() };
    let mut karp = Karp::default();
    let mut bellman_ford = BellmanFord::default();
    let levels = 2 * (n1 + 1) + 1;
    let mut iterations = 0;

    loop {
        compact.rebuild(n1, &profit, &assignment, &load, &capacity);
        let cycle = match config.rule {
            CycleRule::BellmanFord => bellman_ford.negative_cycle(compact.vertex_count, &compact.arcs),
            CycleRule::MinMean => karp.min_mean_cycle(compact.vertex_count, &compact.arcs, levels),
        };
        let Some(cycle) = cycle else { break };
        if config.max_iterations.is_some_and(|cap| iterations >= cap) {
            return Err(Error::IterationCapExceeded(iterations));
        }

        for &a in &cycle.arcs {
            if let Step::Move { recipient, from, to } = compact.steps[a] {
                assignment[recipient] = to;
                load[from] -= 1;
                load[to] += 1;
            }
        }
        iterations += 1;
        // every negative cycle moves at least one recipient, whose arcs carry one unit
        trace.record(CancelEvent { iteration: iterations, length: cycle.len(), cost: cycle.cost, delta: 1 });
    }

    Ok(Outcome { allocation: Allocation::new(assignment), iterations })
}

impl Compact {
    fn rebuild(&mut self, n1: usize, profit: &[Option<i64>], assignment: &[usize], load: &[i64], capacity: &[i64]) {
        self.arcs.clear();
        self.steps.clear();
        for j in 0..n1 {
            if load[j] < capacity[j] {
                self.arcs.push((0, 1 + j, 0));
                self.steps.push(Step::Source);
            }
            if load[j] > 0 {
                self.arcs.push((1 + j, 0, 0));
                self.steps.push(Step::Source);
            }
        }

        self.best.clear();
        self.best.resize(n1 * n1, (i64::MAX, usize::MAX));
        for (i, &k) in assignment.iter().enumerate() {
            let row = &profit[i * n1..(i + 1) * n1];
            let current = row[k].expect("assigned arc exists");
            for (j, p) in row.iter().enumerate() {
                let Some(p) = *p else { continue };
                if j == k {
                    continue;
                }
                // j -> i costs -p, i -> k costs +current
                let cost = current - p;
                let slot = &mut self.best[j * n1 + k];
                if cost < slot.0 {
                    *slot = (cost, i);
                }
            }
        }

        let mut next = 1 + n1;
        for j in 0..n1 {
            for k in 0..n1 {
                let (cost, recipient) = self.best[j * n1 + k];
                if recipient == usize::MAX {
                    continue;
                }
                self.arcs.push((1 + j, next, cost));
                self.steps.push(Step::Move { recipient, from: k, to: j });
                self.arcs.push((next, 1 + k, 0));
                self.steps.push(Step::Exit);
                next += 1;
            }
        }
        self.vertex_count = next;
    }
}
