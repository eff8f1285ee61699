//! `pfml`: command-line front end for the workbench.
//!
//! Exit codes: 0 on success, 1 on a domain failure (invalid model, invalid
//! certificate, failing suite), 2 on usage or parse errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "pfml", version, about = "Exact workbench for probabilistic fuzzy modal logic")]
struct Cli {
    /// Emit the versioned JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock timing in the report (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model file and list every violation.
    Validate { model: PathBuf },
    /// Evaluate a concept or formula.
    Eval(EvalArgs),
    /// Depth-n behavioural distances.
    Dist(DistArgs),
    /// Synthesise a distinguishing concept and certify it.
    Synth(SynthArgs),
    /// Run invariant suites on a model or on seeded random models.
    Check(CheckArgs),
    /// Restrict, unravel or take a disjoint union, writing a model file.
    Transform(TransformArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    model: PathBuf,
    #[arg(long, conflicts_with = "formula", required_unless_present = "formula")]
    concept: Option<String>,
    #[arg(long)]
    formula: Option<String>,
    /// State to evaluate a concept at, or to bind the single free variable to.
    #[arg(long, conflicts_with = "all_states")]
    state: Option<String>,
    /// Variable bindings `x=a`; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    env: Vec<String>,
    /// Print the value at every state.
    #[arg(long)]
    all_states: bool,
    /// Role read by `P x y.` in formulas.
    #[arg(long, default_value = "r")]
    role: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    Wasserstein,
    Kantorovich,
    Game,
    LogicalLb,
    LogicalWitness,
    All,
}

#[derive(Args, Debug)]
struct DistArgs {
    model: PathBuf,
    #[arg(long)]
    depth: usize,
    #[arg(long, value_enum, default_value = "wasserstein")]
    method: MethodArg,
    /// Restrict output to one pair `a,b`.
    #[arg(long)]
    pair: Option<String>,
    /// Support bound for coupling vertex enumeration (game method).
    #[arg(long, default_value_t = 5)]
    vertex_bound: usize,
    /// Largest concept (node count) enumerated by the logical lower bound.
    #[arg(long, default_value_t = 4)]
    max_size: usize,
    /// Maximum number of concepts enumerated by the logical lower bound.
    #[arg(long, default_value_t = 50_000)]
    budget: usize,
}

#[derive(Args, Debug)]
struct SynthArgs {
    model: PathBuf,
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    pair: String,
    /// Accept a certificate whose achieved value falls short by at most this.
    #[arg(long, default_value = "0")]
    eps: String,
    /// Ceiling on distinct concept nodes.
    #[arg(long, default_value_t = pfml::synthesis::DEFAULT_SIZE_CEILING)]
    max_size: usize,
    /// Also print the concept as a shared node list.
    #[arg(long)]
    shared: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Model file; omit when using --random.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    model: Option<PathBuf>,
    /// COUNT SIZE_BOUND DENOM_BOUND: generate models instead of reading one.
    #[arg(long, num_args = 3, value_names = ["COUNT", "SIZE_BOUND", "DENOM_BOUND"])]
    random: Option<Vec<u64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated suites; all suites when omitted.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Random samples per model for the sampling suites.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 5)]
    vertex_bound: usize,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "transform_op")]
struct TransformOp {
    /// `a,k`: radius-k neighbourhood of a, frontier made blocking.
    #[arg(long)]
    restrict: Option<String>,
    /// `a,k`: tree of paths of length at most k from a.
    #[arg(long)]
    unravel: Option<String>,
    /// Disjoint union with another model file.
    #[arg(long)]
    union: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TransformArgs {
    model: PathBuf,
    #[command(flatten)]
    op: TransformOp,
    /// Output path; the model is printed when omitted.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = report::Options {
        json: cli.json,
        timing: cli.timing,
    };
    let result = match cli.command {
        Command::Validate { model } => commands::validate(&model, opts),
        Command::Eval(args) => commands::eval(&args, opts),
        Command::Dist(args) => commands::dist(&args, opts),
        Command::Synth(args) => commands::synth(&args, opts),
        Command::Check(args) => commands::check(&args, opts),
        Command::Transform(args) => commands::transform(&args, opts),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
