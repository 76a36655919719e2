//! Subcommand definitions and their implementations.
//!
//! Exit codes: 0 on success, 1 on input, parse or IO errors, 2 when the
//! instance or baseline is infeasible.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use allocflow_core::model::{DEFAULT_COST_SCALE, ProblemInstance};
use allocflow_core::network::{build_network, build_pareto_network, scaled_outcomes};
use allocflow_core::solver::{solve_pareto_traced, solve_traced, CancelEvent, NoTrace, TraceSink};
use allocflow_core::stats::{compare_mechanisms, PermutationConfig, Weighting};
use allocflow_core::{allocation_value, Allocation, CycleRule, Error as CoreError, SolverConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use thiserror::Error;

use crate::bench::{self, BenchGrid};
use crate::generate::{generate, random_baseline, slack_capacity, GenParams};
use crate::input::{self, CapacitySpec, InputError};
use crate::output::{self, AllocationJson, CompareJson, ParetoJson, PermutationJson};
use crate::{dimacs, parallel};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Input(_) => 1,
            CommandError::Infeasible(_) => 2,
        }
    }
}

impl From<InputError> for CommandError {
    fn from(e: InputError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<io::Error> for CommandError {
    fn from(e: io::Error) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<CoreError> for CommandError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Infeasible { .. } | CoreError::InfeasibleBaseline => CommandError::Infeasible(e.to_string()),
            _ => CommandError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "allocflow", version, about = "Optimal capacity-constrained treatment allocation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal allocation for an outcome matrix.
    Solve(SolveArgs),
    /// Best allocation leaving nobody worse off than a baseline.
    Pareto(ParetoArgs),
    /// Mean outcome under actual, greedy, optimal and Pareto-optimal allocation.
    Compare(CompareArgs),
    /// Permutation test of between-arm differences within groups.
    Permtest(PermtestArgs),
    /// Write a synthetic outcome matrix.
    Gen(GenArgs),
    /// Time the solver over a grid of instance sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    BellmanFord,
    MinMean,
}

impl From<RuleArg> for CycleRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::BellmanFord => CycleRule::BellmanFord,
            RuleArg::MinMean => CycleRule::MinMean,
        }
    }
}

#[derive(Debug, Clone, Args)]
#[group(id = "caps", required = true, multiple = false)]
pub struct CapacityArgs {
    /// Same capacity for every treatment.
    #[arg(long, group = "caps")]
    pub capacity: Option<i64>,
    /// Comma-separated capacity per treatment.
    #[arg(long, group = "caps")]
    pub capacities: Option<String>,
}

impl CapacityArgs {
    fn spec(&self) -> Result<CapacitySpec, CommandError> {
        match (&self.capacity, &self.capacities) {
            (Some(m), _) => Ok(CapacitySpec::Uniform(*m)),
            (None, Some(list)) => Ok(CapacitySpec::parse_list(list)?),
            (None, None) => Err(CommandError::Input("a capacity is required".into())),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Outcome matrix: headerless CSV, one row per recipient.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub capacity: CapacityArgs,
    /// Outcomes are multiplied by this and rounded to integer costs.
    #[arg(long, default_value_t = DEFAULT_COST_SCALE)]
    pub cost_scale: i64,
    #[arg(long, value_enum, default_value_t = RuleArg::MinMean)]
    pub rule: RuleArg,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write the flow network in DIMACS format to this path.
    #[arg(long)]
    pub dump_network: Option<PathBuf>,
    /// Log every canceled cycle to standard error.
    #[arg(long)]
    pub trace: bool,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig { rule: self.rule.into(), max_iterations: self.max_iterations }
    }

    fn instance(&self) -> Result<ProblemInstance, CommandError> {
        let rows = input::read_matrix(&self.input)?;
        let treatments = rows.first().map_or(0, Vec::len);
        let instance = ProblemInstance::new(&rows, self.capacity.spec()?.resolve(treatments), self.cost_scale)?;
        scaled_outcomes(&instance)?;
        Ok(instance)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ParetoArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Baseline allocation: one treatment index per line.
    #[arg(long)]
    pub baseline: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Actual allocation: one treatment index per line.
    #[arg(long)]
    pub baseline: PathBuf,
    /// Visit recipients in a shuffled order for the greedy mechanism.
    #[arg(long)]
    pub order_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Pair,
    Group,
}

#[derive(Debug, Clone, Args)]
pub struct PermtestArgs {
    /// CSV with columns group,arm,outcome.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = WeightingArg::Pair)]
    pub weighting: WeightingArg,
    /// Worker threads; defaults to $ALLOCFLOW_THREADS or all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub n2: usize,
    /// Same capacity for every treatment (default: ceil(n2 / n1)).
    #[arg(long, conflicts_with = "capacities")]
    pub capacity: Option<i64>,
    #[arg(long)]
    pub capacities: Option<String>,
    /// Strength of recipient-specific treatment gains, in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub heterogeneity: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Matrix destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write a random feasible baseline allocation here.
    #[arg(long)]
    pub baseline_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchRule {
    BellmanFord,
    MinMean,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 10)]
    pub n1: usize,
    /// Comma-separated recipient counts.
    #[arg(long, default_value = "100,200,400")]
    pub n2: String,
    /// Uniform capacity; default ceil(n2 * slack / n1).
    #[arg(long)]
    pub capacity: Option<i64>,
    #[arg(long, default_value_t = 1.0)]
    pub slack: f64,
    #[arg(long, value_enum, default_value_t = BenchRule::MinMean)]
    pub rule: BenchRule,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub heterogeneity: f64,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CommandError> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args, out, err),
        Command::Pareto(args) => cmd_pareto(&args, out, err),
        Command::Compare(args) => cmd_compare(&args, out),
        Command::Permtest(args) => cmd_permtest(&args, out),
        Command::Gen(args) => cmd_gen(&args, out),
        Command::Bench(args) => cmd_bench(&args, out, err),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with(argv: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let kind = if e.exit_code() == 2 { "infeasible" } else { "error" };
            let _ = writeln!(err, "{kind}: {e}");
            e.exit_code()
        }
    }
}

struct StderrTrace<'a>(&'a mut dyn Write);

impl TraceSink for StderrTrace<'_> {
    fn record(&mut self, e: CancelEvent) {
        let _ = writeln!(self.0, "cancel {} length={} cost={} delta={}", e.iteration, e.length, e.cost, e.delta);
    }
}

fn dump(path: &Path, net: &allocflow_core::Network) -> Result<(), CommandError> {
    fs::write(path, dimacs::to_string(net)).map_err(|e| CommandError::Input(format!("{}: {e}", path.display())))
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CommandError> {
    let s = &args.solver;
    let instance = s.instance()?;
    if let Some(path) = &s.dump_network {
        dump(path, &build_network(&instance)?)?;
    }
    let report = if s.trace {
        solve_traced(&instance, &s.config(), &mut StderrTrace(err))?
    } else {
        solve_traced(&instance, &s.config(), &mut NoTrace)?
    };
    let json = AllocationJson::from(&report);
    let text = if s.json { output::to_json(&json) } else { output::allocation_text(&json) };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn read_baseline(path: &Path, instance: &ProblemInstance) -> Result<Allocation, CommandError> {
    let baseline = input::read_baseline(path)?;
    if baseline.len() != instance.recipients() {
        return Err(CommandError::Input(format!(
            "{}: baseline lists {} recipients, matrix has {}",
            path.display(),
            baseline.len(),
            instance.recipients()
        )));
    }
    Ok(baseline)
}

pub fn cmd_pareto(args: &ParetoArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CommandError> {
    let s = &args.solver;
    let instance = s.instance()?;
    let baseline = read_baseline(&args.baseline, &instance)?;
    if let Some(path) = &s.dump_network {
        dump(path, &build_pareto_network(&instance, &baseline)?)?;
    }
    let report = if s.trace {
        solve_pareto_traced(&instance, &baseline, &s.config(), &mut StderrTrace(err))?
    } else {
        solve_pareto_traced(&instance, &baseline, &s.config(), &mut NoTrace)?
    };
    let delta = (0..instance.recipients())
        .map(|i| instance.outcome(i, report.allocation.assignment[i]) - instance.outcome(i, baseline.assignment[i]))
        .collect();
    let json = ParetoJson {
        allocation: AllocationJson::from(&report),
        baseline_total: allocation_value(&instance, &baseline)?.total,
        delta,
    };
    let text = if s.json { output::to_json(&json) } else { output::pareto_text(&json) };
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> Result<(), CommandError> {
    let s = &args.solver;
    let instance = s.instance()?;
    let actual = read_baseline(&args.baseline, &instance)?;
    let mut order: Vec<usize> = (0..instance.recipients()).collect();
    if let Some(seed) = args.order_seed {
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    }
    let report = compare_mechanisms(&instance, &actual, &order, &s.config())?;
    let json = CompareJson::new(&report, instance.recipients());
    let text = if s.json { output::to_json(&json) } else { output::compare_text(&json) };
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn cmd_permtest(args: &PermtestArgs, out: &mut dyn Write) -> Result<(), CommandError> {
    let data = input::read_grouped(&args.input)?;
    let config = PermutationConfig {
        replicates: args.replicates,
        seed: args.seed,
        weighting: match args.weighting {
            WeightingArg::Pair => Weighting::Pair,
            WeightingArg::Group => Weighting::Group,
        },
    };
    let report = parallel::permutation_test(&data, &config, args.threads.or_else(parallel::thread_count))?;
    let json = PermutationJson::from(&report);
    let text = if args.json { output::to_json(&json) } else { output::permutation_text(&json) };
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<(), CommandError> {
    let generated = generate(&GenParams {
        treatments: args.n1,
        recipients: args.n2,
        heterogeneity: args.heterogeneity,
        seed: args.seed,
    })
    .map_err(CommandError::Input)?;
    let capacities = match (&args.capacity, &args.capacities) {
        (Some(m), _) => CapacitySpec::Uniform(*m),
        (None, Some(list)) => CapacitySpec::parse_list(list)?,
        (None, None) => CapacitySpec::Uniform(slack_capacity(args.n1, args.n2, 1.0)),
    }
    .resolve(args.n1);
    if capacities.len() != args.n1 || capacities.iter().any(|&m| m < 0) {
        return Err(CommandError::Input(format!("capacities {capacities:?} do not fit {} treatments", args.n1)));
    }

    let csv = generated.to_csv();
    match &args.output {
        Some(path) => fs::write(path, &csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    if let Some(path) = &args.baseline_out {
        let baseline = random_baseline(&capacities, args.n2, args.seed).ok_or_else(|| {
            CommandError::Input(format!("capacities {capacities:?} cannot hold {} recipients", args.n2))
        })?;
        let text: String = baseline.assignment.iter().map(|j| format!("{j}\n")).collect();
        fs::write(path, text)?;
    }
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CommandError> {
    if args.n1 == 0 || args.reps == 0 || args.slack < 1.0 {
        return Err(CommandError::Input("bench needs n1 >= 1, reps >= 1 and slack >= 1".into()));
    }
    let grid = BenchGrid {
        treatments: args.n1,
        recipients: bench::parse_sizes(&args.n2).map_err(CommandError::Input)?,
        capacity: args.capacity,
        slack: args.slack,
        rules: match args.rule {
            BenchRule::BellmanFord => vec![CycleRule::BellmanFord],
            BenchRule::MinMean => vec![CycleRule::MinMean],
            BenchRule::Both => vec![CycleRule::BellmanFord, CycleRule::MinMean],
        },
        repetitions: args.reps,
        seed: args.seed,
        heterogeneity: args.heterogeneity,
    };
    let rows = bench::run(&grid, |row| {
        let _ = writeln!(err, "{}", bench::csv_line(row));
    })
    .map_err(CommandError::Input)?;
    let mut csv = Vec::new();
    bench::write_csv(&rows, &mut csv)?;
    match &args.output {
        Some(path) => fs::write(path, &csv)?,
        None => out.write_all(&csv)?,
    }
    Ok(())
}
