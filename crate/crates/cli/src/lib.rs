//! File formats, drivers and the command line for `allocflow-core`.
//!
//! * [`input`]: outcome matrices, baselines, capacities and grouped data.
//! * [`output`]: text and JSON reports.
//! * [`dimacs`]: network dumps for external solvers.
//! * [`generate`]: seeded synthetic instances.
//! * [`bench`]: the timing harness.
//! * [`parallel`]: multi-threaded permutation test.
//! * [`commands`]: the `allocflow` subcommands.

pub mod bench;
pub mod commands;
pub mod dimacs;
pub mod generate;
pub mod input;
pub mod output;
pub mod parallel;

pub use commands::{main_with, Cli, CommandError};
