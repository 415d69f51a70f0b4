//! `ctensor`: synthesize, unfold, transform, fit and audit tensor models.
//!
//! Exit status is 0 on success, 1 on usage or input errors and 2 on numeric
//! or identifiability failures.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ctensor", version, about = "Constrained tensor models from the command line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize the tensor of a model descriptor.
    Synth(SynthArgs),
    /// Matricize a tensor along a mode partition.
    Unfold(UnfoldArgs),
    /// Rewrite a model in another family.
    Transform(TransformArgs),
    /// Estimate model parameters from a tensor.
    Fit(FitArgs),
    /// Evaluate uniqueness conditions for a model.
    Check(CheckArgs),
    /// Describe a tensor or model file.
    Info(InfoArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Write the binary tensor format.
    #[arg(long)]
    binary: bool,
}

#[derive(Args, Debug)]
struct UnfoldArgs {
    #[arg(long)]
    input: PathBuf,
    /// Row modes, 1-based and comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    s1: Vec<usize>,
    /// Column modes, 1-based and comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    s2: Vec<usize>,
    /// Matrix file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Parafac,
    Parafac3,
    Parafac4,
    Tucker,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    to: Target,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FitFamily {
    Parafac,
    Confac,
    Paratuck24,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    family: FitFamily,
    /// Number of components (parafac).
    #[arg(long)]
    rank: Option<usize>,
    /// Descriptor holding the known constraint matrices (and input tensor
    /// for paratuck24).
    #[arg(long)]
    known: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random ALS starts; the lowest final error wins.
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    kruskal: bool,
    /// Relaxed conditions for third-order models with a full-rank last factor.
    #[arg(long)]
    relaxed: bool,
    #[arg(long)]
    unimode: bool,
    /// Sampled PARALIND condition on the first factor.
    #[arg(long)]
    paralind: bool,
    #[arg(long)]
    paratuck: bool,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct InfoArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
