//! The layered flow network of an allocation instance, flows on it and the
//! residual networks used by cycle canceling.
//!
//! Vertices are numbered `s = 0`, treatments `1..=n1`, recipients
//! `n1+1..=n1+n2` and `t = n1+n2+1`. Arcs come in canonical order: every
//! `s -> treatment` arc by treatment, then every `treatment -> recipient` arc
//! by `(treatment, recipient)`, then every `recipient -> t` arc by recipient.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Allocation, ProblemInstance};

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub lower: i64,
    pub upper: i64,
    pub cost: i64,
}

/// Role of an arc in an allocation network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    Source { treatment: usize },
    Assign { treatment: usize, recipient: usize },
    Sink { recipient: usize },
}

/// Vertex numbering of an allocation network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub treatments: usize,
    pub recipients: usize,
}

impl Layout {
    pub const fn source(&self) -> usize {
        0
    }

    pub const fn treatment(&self, j: usize) -> usize {
        1 + j
    }

    pub const fn recipient(&self, i: usize) -> usize {
        1 + self.treatments + i
    }

    pub const fn sink(&self) -> usize {
        1 + self.treatments + self.recipients
    }

    pub const fn vertex_count(&self) -> usize {
        2 + self.treatments + self.recipients
    }
}

#[derive(Debug, Clone)]
struct Allocating {
    layout: Layout,
    kinds: Vec<ArcKind>,
    // arc index of (treatment, recipient), row-major by recipient
    assign_index: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Network {
    vertex_count: usize,
    arcs: Vec<Arc>,
    balance: Vec<i64>,
    allocating: Option<Allocating>,
}

impl Network {
    /// A general network. Checks `lower <= upper`, endpoint ranges and that
    /// balances sum to zero.
    pub fn new(vertex_count: usize, arcs: Vec<Arc>, balance: Vec<i64>) -> Result<Self> {
        if balance.len() != vertex_count {
            return Err(Error::IndexOutOfRange { index: balance.len(), bound: vertex_count });
        }
        for (a, arc) in arcs.iter().enumerate() {
            for v in [arc.tail, arc.head] {
                if v >= vertex_count {
                    return Err(Error::IndexOutOfRange { index: v, bound: vertex_count });
                }
            }
            if arc.lower < 0 || arc.lower > arc.upper {
                return Err(Error::InvalidBounds { arc: a, lower: arc.lower, upper: arc.upper });
            }
        }
        let sum: i64 = balance.iter().sum();
        if sum != 0 {
            return Err(Error::UnbalancedNetwork(sum));
        }
        Ok(Network { vertex_count, arcs, balance, allocating: None })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn balance(&self) -> &[i64] {
        &self.balance
    }

    /// Vertex layout, if this network was built from an instance.
    pub fn layout(&self) -> Option<Layout> {
        self.allocating.as_ref().map(|a| a.layout)
    }

    pub fn arc_kind(&self, arc: usize) -> Option<ArcKind> {
        self.allocating.as_ref().and_then(|a| a.kinds.get(arc).copied())
    }

    /// Index of the arc from `treatment` to `recipient`, if present.
    pub fn assign_arc(&self, treatment: usize, recipient: usize) -> Option<usize> {
        let alloc = self.allocating.as_ref()?;
        let Layout { treatments, recipients } = alloc.layout;
        if treatment >= treatments || recipient >= recipients {
            return None;
        }
        let a = alloc.assign_index[recipient * treatments + treatment];
        (a != ABSENT).then_some(a)
    }

    /// Builds the flow that routes each recipient through its assigned
    /// treatment.
    pub fn flow_from_allocation(&self, alloc: &Allocation) -> Result<Flow> {
        let layout = self.layout().ok_or(Error::NotLayered)?;
        if alloc.len() != layout.recipients {
            return Err(Error::RecipientCountMismatch { expected: layout.recipients, found: alloc.len() });
        }
        let mut values = vec![0i64; self.arcs.len()];
        for (i, &j) in alloc.assignment.iter().enumerate() {
            if j >= layout.treatments {
                return Err(Error::IndexOutOfRange { index: j, bound: layout.treatments });
            }
            // source arcs are the first n1 arcs, sink arcs the last n2
            values[j] += 1;
            let a = self.assign_arc(j, i).ok_or(Error::InfeasibleBaseline)?;
            values[a] = 1;
            values[self.arcs.len() - layout.recipients + i] = 1;
        }
        Ok(Flow { values })
    }
}

/// Rounds `Y * cost_scale` to integers, row-major like the outcomes.
pub fn scaled_outcomes(instance: &ProblemInstance) -> Result<Vec<i64>> {
    let scale = instance.cost_scale() as f64;
    let mut out = Vec::with_capacity(instance.recipients() * instance.treatments());
    let mut max_abs: i64 = 0;
    for row in instance.rows() {
        for &y in row {
            let scaled = libm::round(y * scale);
            if !(scaled.abs() < 9.0e18) {
                return Err(Error::CostOverflow);
            }
            let c = scaled as i64;
            max_abs = max_abs.max(c.abs());
            out.push(c);
        }
    }
    // flow costs sum n2 of these; cycle searches sum up to two per vertex
    let vertices = instance.recipients() + instance.treatments() + 2;
    let bound = (2 * vertices.max(instance.recipients())) as i64;
    max_abs.checked_mul(bound).ok_or(Error::CostOverflow)?;
    Ok(out)
}

fn build_allocating(instance: &ProblemInstance, keep: impl Fn(usize, usize) -> bool) -> Result<Network> {
    let scaled = scaled_outcomes(instance)?;
    let layout = Layout { treatments: instance.treatments(), recipients: instance.recipients() };
    let (n1, n2) = (layout.treatments, layout.recipients);
    let mut arcs = Vec::with_capacity(n1 + n2 + n1 * n2);
    let mut kinds = Vec::with_capacity(arcs.capacity());
    let mut assign_index = vec![ABSENT; n1 * n2];

    for (j, &m) in instance.capacities().iter().enumerate() {
        arcs.push(Arc { tail: layout.source(), head: layout.treatment(j), lower: 0, upper: m, cost: 0 });
        kinds.push(ArcKind::Source { treatment: j });
    }
    for j in 0..n1 {
        for i in 0..n2 {
            if !keep(j, i) {
                continue;
            }
            assign_index[i * n1 + j] = arcs.len();
            arcs.push(Arc {
                tail: layout.treatment(j),
                head: layout.recipient(i),
                lower: 0,
                upper: 1,
                cost: -scaled[i * n1 + j],
            });
            kinds.push(ArcKind::Assign { treatment: j, recipient: i });
        }
    }
    for i in 0..n2 {
        arcs.push(Arc { tail: layout.recipient(i), head: layout.sink(), lower: 1, upper: 1, cost: 0 });
        kinds.push(ArcKind::Sink { recipient: i });
    }

    let mut balance = vec![0i64; layout.vertex_count()];
    balance[layout.source()] = n2 as i64;
    balance[layout.sink()] = -(n2 as i64);

    let mut net = Network::new(layout.vertex_count(), arcs, balance)?;
    net.allocating = Some(Allocating { layout, kinds, assign_index });
    Ok(net)
}

/// The network whose integer minimum-cost feasible flows are exactly the
/// optimal allocations, with costs `-round(Y * cost_scale)`.
pub fn build_network(instance: &ProblemInstance) -> Result<Network> {
    build_allocating(instance, |_, _| true)
}

/// Like [`build_network`] but without the arcs that would leave a recipient
/// strictly worse off than under `baseline`.
pub fn build_pareto_network(instance: &ProblemInstance, baseline: &Allocation) -> Result<Network> {
    baseline.check(instance).map_err(|_| Error::InfeasibleBaseline)?;
    build_allocating(instance, |j, i| {
        instance.outcome(i, j) >= instance.outcome(i, baseline.assignment[i])
    })
}

/// Integer flow value per arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub values: Vec<i64>,
}

impl Flow {
    pub fn zero(net: &Network) -> Self {
        Flow { values: vec![0; net.arcs.len()] }
    }

    /// Pushes `delta` units around `cycle`, given as residual arc indices.
    pub fn augment(&mut self, res: &ResidualNetwork, cycle: &[usize], delta: i64) {
        for &r in cycle {
            let origin = res.arcs[r].origin;
            match origin.direction {
                Direction::Forward => self.values[origin.arc] += delta,
                Direction::Backward => self.values[origin.arc] -= delta,
            }
        }
    }
}

/// Outflow minus inflow at `v`.
pub fn balance_vector(net: &Network, flow: &Flow, v: usize) -> Result<i64> {
    if v >= net.vertex_count {
        return Err(Error::IndexOutOfRange { index: v, bound: net.vertex_count });
    }
    Ok(net
        .arcs
        .iter()
        .zip(&flow.values)
        .map(|(arc, &x)| {
            let out = if arc.tail == v { x } else { 0 };
            let inn = if arc.head == v { x } else { 0 };
            out - inn
        })
        .sum())
}

/// Outflow minus inflow at every vertex.
pub fn balances(net: &Network, flow: &Flow) -> Vec<i64> {
    let mut b = vec![0i64; net.vertex_count];
    for (arc, &x) in net.arcs.iter().zip(&flow.values) {
        b[arc.tail] += x;
        b[arc.head] -= x;
    }
    b
}

pub fn is_feasible(net: &Network, flow: &Flow) -> bool {
    flow.values.len() == net.arcs.len()
        && net.arcs.iter().zip(&flow.values).all(|(arc, &x)| arc.lower <= x && x <= arc.upper)
        && balances(net, flow) == net.balance
}

pub fn flow_cost(net: &Network, flow: &Flow) -> i64 {
    net.arcs.iter().zip(&flow.values).map(|(arc, &x)| arc.cost * x).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// The network arc a residual arc stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcRef {
    pub arc: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidualArc {
    pub tail: usize,
    pub head: usize,
    pub capacity: i64,
    pub cost: i64,
    pub origin: ArcRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualNetwork {
    pub vertex_count: usize,
    pub arcs: Vec<ResidualArc>,
}

impl ResidualNetwork {
    /// Wraps an arbitrary arc list, e.g. for testing the cycle searches.
    pub fn from_arcs(vertex_count: usize, arcs: Vec<ResidualArc>) -> Self {
        ResidualNetwork { vertex_count, arcs }
    }

    /// `(tail, head, cost)` triples in arc order.
    pub fn cost_arcs(&self) -> Vec<(usize, usize, i64)> {
        self.arcs.iter().map(|a| (a.tail, a.head, a.cost)).collect()
    }

    pub fn cycle_cost(&self, cycle: &[usize]) -> i64 {
        cycle.iter().map(|&r| self.arcs[r].cost).sum()
    }

    /// Smallest residual capacity along `cycle`.
    pub fn bottleneck(&self, cycle: &[usize]) -> i64 {
        cycle.iter().map(|&r| self.arcs[r].capacity).min().unwrap_or(0)
    }
}

/// Residual network of a feasible flow. Zero-capacity arcs are omitted.
pub fn residual(net: &Network, flow: &Flow) -> Result<ResidualNetwork> {
    if !is_feasible(net, flow) {
        return Err(Error::InfeasibleFlow);
    }
    let mut arcs = Vec::new();
    for (a, (arc, &x)) in net.arcs.iter().zip(&flow.values).enumerate() {
        if x < arc.upper {
            arcs.push(ResidualArc {
                tail: arc.tail,
                head: arc.head,
                capacity: arc.upper - x,
                cost: arc.cost,
                origin: ArcRef { arc: a, direction: Direction::Forward },
            });
        }
        if x > arc.lower {
            arcs.push(ResidualArc {
                tail: arc.head,
                head: arc.tail,
                capacity: x - arc.lower,
                cost: -arc.cost,
                origin: ArcRef { arc: a, direction: Direction::Backward },
            });
        }
    }
    Ok(ResidualNetwork { vertex_count: net.vertex_count, arcs })
}
