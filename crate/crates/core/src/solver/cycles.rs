//! Negative-cycle and minimum-mean-cycle searches on plain arc lists.
//!
//! Both searches start from a virtual source joined to every vertex at zero
//! cost, so every cycle of the graph is reachable. Arcs are scanned in list
//! order and labels only improve on strict decrease, which makes the cycle
//! returned a deterministic function of the arc order.
//!
//! `levels` is the walk length used by Karp's recurrence. It must exceed the
//! number of arcs on any simple path of the graph; the vertex count is always
//! safe, and sparser structures admit a smaller bound.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::network::ResidualNetwork;

const NONE: u32 = u32::MAX;
const INF: i64 = i64::MAX;

/// A directed cycle given as arc indices in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub arcs: Vec<usize>,
    pub cost: i64,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Compares mean costs exactly.
    pub fn cmp_mean(&self, other: &Cycle) -> Ordering {
        cmp_fraction(self.cost, self.len() as i64, other.cost, other.len() as i64)
    }

    fn from_arcs(arcs: Vec<usize>, graph: &[(usize, usize, i64)]) -> Self {
        let cost = arcs.iter().map(|&a| graph[a].2).sum();
        Cycle { arcs, cost }
    }
}

/// Compares `a/b` with `c/d` for positive denominators.
pub fn cmp_fraction(a: i64, b: i64, c: i64, d: i64) -> Ordering {
    debug_assert!(b > 0 && d > 0);
    (a as i128 * d as i128).cmp(&(c as i128 * b as i128))
}

/// Reusable buffers for [`BellmanFord::negative_cycle`].
#[derive(Debug, Default)]
pub struct BellmanFord {
    dist: Vec<i64>,
    pred: Vec<u32>,
    stamp: Vec<u32>,
}

impl BellmanFord {
    /// Finds some negative cycle, or `None` when there is none.
    ///
    /// Passes over the arc list until labels settle. After each pass the
    /// predecessor graph is searched for a cycle; any such cycle is negative,
    /// and one appears eventually whenever a negative cycle exists.
    pub fn negative_cycle(&mut self, vertex_count: usize, arcs: &[(usize, usize, i64)]) -> Option<Cycle> {
        self.dist.clear();
        self.dist.resize(vertex_count, 0);
        self.pred.clear();
        self.pred.resize(vertex_count, NONE);
        loop {
            let mut changed = false;
            for (a, &(tail, head, cost)) in arcs.iter().enumerate() {
                let cand = self.dist[tail] + cost;
                if cand < self.dist[head] {
                    self.dist[head] = cand;
                    self.pred[head] = a as u32;
                    changed = true;
                }
            }
            if !changed {
                return None;
            }
            if let Some(cycle) = self.predecessor_cycle(vertex_count, arcs) {
                return Some(Cycle::from_arcs(cycle, arcs));
            }
        }
    }

    fn predecessor_cycle(&mut self, vertex_count: usize, arcs: &[(usize, usize, i64)]) -> Option<Vec<usize>> {
        self.stamp.clear();
        self.stamp.resize(vertex_count, NONE);
        for start in 0..vertex_count {
            let mut v = start;
            while self.stamp[v] == NONE {
                self.stamp[v] = start as u32;
                match self.pred[v] {
                    NONE => break,
                    a => v = arcs[a as usize].0,
                }
            }
            if self.stamp[v] == start as u32 && self.pred[v] != NONE {
                // v lies on a cycle discovered in this walk
                let mut cycle = Vec::new();
                let mut u = v;
                loop {
                    let a = self.pred[u] as usize;
                    cycle.push(a);
                    u = arcs[a].0;
                    if u == v {
                        break;
                    }
                }
                cycle.reverse();
                return Some(cycle);
            }
        }
        None
    }
}

/// Reusable buffers for [`Karp::min_mean_cycle`].
#[derive(Debug, Default)]
pub struct Karp {
    walk: Vec<i64>,
    pred: Vec<u32>,
    seen: Vec<u32>,
}

impl Karp {
    /// Returns a cycle of minimum mean cost if that mean is negative.
    ///
    /// `walk[k][v]` is the cheapest walk of exactly `k` arcs ending at `v`.
    /// The minimum cycle mean is `min_v max_k (walk[L][v] - walk[k][v]) / (L - k)`
    /// and every cycle on the optimal `L`-arc walk into the minimizing vertex
    /// attains it.
    pub fn min_mean_cycle(
        &mut self,
        vertex_count: usize,
        arcs: &[(usize, usize, i64)],
        levels: usize,
    ) -> Option<Cycle> {
        if vertex_count == 0 || arcs.is_empty() {
            return None;
        }
        let n = vertex_count;
        let levels = levels.clamp(1, n);
        self.walk.clear();
        self.walk.resize((levels + 1) * n, INF);
        self.pred.clear();
        self.pred.resize((levels + 1) * n, NONE);
        self.walk[..n].fill(0);

        for k in 1..=levels {
            let (prev, cur) = self.walk[(k - 1) * n..(k + 1) * n].split_at_mut(n);
            let pred = &mut self.pred[k * n..(k + 1) * n];
            for (a, &(tail, head, cost)) in arcs.iter().enumerate() {
                let from = prev[tail];
                if from == INF {
                    continue;
                }
                let cand = from + cost;
                if cand < cur[head] {
                    cur[head] = cand;
                    pred[head] = a as u32;
                }
            }
        }

        let last = levels * n;
        let mut best: Option<(i64, i64, usize)> = None;
        for v in 0..n {
            let full = self.walk[last + v];
            if full == INF {
                continue;
            }
            let mut worst: Option<(i64, i64)> = None;
            for k in 0..levels {
                let part = self.walk[k * n + v];
                if part == INF {
                    continue;
                }
                let (num, den) = (full - part, (levels - k) as i64);
                if worst.is_none_or(|(wn, wd)| cmp_fraction(num, den, wn, wd) == Ordering::Greater) {
                    worst = Some((num, den));
                }
            }
            let (num, den) = worst.expect("level zero is always finite");
            if best.is_none_or(|(bn, bd, _)| cmp_fraction(num, den, bn, bd) == Ordering::Less) {
                best = Some((num, den, v));
            }
        }
        let (num, _, vertex) = best?;
        if num >= 0 {
            return None;
        }
        Some(Cycle::from_arcs(self.cycle_on_walk(n, arcs, levels, vertex), arcs))
    }

    fn cycle_on_walk(&mut self, n: usize, arcs: &[(usize, usize, i64)], levels: usize, end: usize) -> Vec<usize> {
        self.seen.clear();
        self.seen.resize(n, NONE);
        // vertex at each level of the walk, filled from the end backwards
        let mut at = vec![0usize; levels + 1];
        let mut v = end;
        let mut k = levels;
        loop {
            at[k] = v;
            if self.seen[v] != NONE {
                let top = self.seen[v] as usize;
                return (k + 1..=top).map(|l| self.pred[l * n + at[l]] as usize).collect();
            }
            self.seen[v] = k as u32;
            v = arcs[self.pred[k * n + v] as usize].0;
            k -= 1;
        }
    }
}

/// Some negative cycle of `res` (Bellman-Ford-Moore), as residual arc indices.
pub fn find_negative_cycle(res: &ResidualNetwork) -> Option<Cycle> {
    BellmanFord::default().negative_cycle(res.vertex_count, &res.cost_arcs())
}

/// A residual cycle of minimum mean cost, if that mean is negative.
pub fn find_min_mean_cycle(res: &ResidualNetwork) -> Option<Cycle> {
    Karp::default().min_mean_cycle(res.vertex_count, &res.cost_arcs(), res.vertex_count)
}
