//! Optimal allocation of capacity-constrained treatments to recipients.
//!
//! Every recipient receives exactly one treatment, every treatment `j` serves
//! at most `m_j` recipients, and the goal is the largest total outcome. The
//! problem is reduced to an integer minimum-cost feasible flow on a layered
//! network (source, treatments, recipients, sink) and solved by cycle
//! canceling, either with Bellman-Ford-Moore negative-cycle detection or with
//! minimum-mean-cycle selection (Karp).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and parallel drivers live in the `allocflow` crate.
//!
//! Modules:
//!
//! * [`model`]: problem instances, allocations and their values.
//! * [`network`]: the flow network, flows, balances and residual networks.
//! * [`solver`]: cycle canceling and the optimal / Pareto-guaranteed solvers.
//! * [`heuristic`]: the greedy per-recipient baseline.
//! * [`oracle`]: exhaustive enumeration on small instances.
//! * [`stats`]: the permutation test on grouped outcomes and the
//!   mechanism comparison.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod heuristic;
pub mod model;
pub mod network;
pub mod oracle;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
pub use heuristic::greedy_allocate;
pub use model::{allocation_value, feasibility_check, Allocation, AllocationValue, Feasibility, ProblemInstance};
pub use network::{Flow, Network, ResidualNetwork};
pub use oracle::{brute_force_optimal, brute_force_pareto};
pub use solver::{solve, solve_pareto, CycleRule, SolveReport, SolverConfig};
pub use stats::{compare_mechanisms, permutation_test, GroupedOutcomes, MechanismReport, PermutationReport};
