//! `laplace-bounds`: constant tables, thresholds, certified brackets and
//! oracle verification for Laplace-type integrals.

mod commands;
mod config;
mod report;

use clap::{Args, Parser, Subcommand};
use config::{CommandKind, ConstantSource, NList, OutputFormat, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "laplace-bounds", version, about)]
struct Cli {
    /// JSON run configuration; flags given on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Error constants and thresholds.
    Constants(Opts),
    /// Validity thresholds with the binding condition.
    Threshold(Opts),
    /// Certified brackets at each n.
    Bracket(Opts),
    /// Brackets checked against the oracle; exits 3 on a certified miss.
    Verify(Opts),
    /// Exact Dixon sums against the bracket.
    Dixon(Opts),
    /// McClure–Wong radius next to ours.
    CompareMcw(Opts),
    /// Dump the problem's local data as JSON.
    Local(Opts),
}

#[derive(Args, Default)]
struct Opts {
    /// Selector (`dixon2:r2=pi2/108`, `dixon:d=3,eta=0.2`,
    /// `separable-cubic:d=2,gamma=0.5`, `gaussian:d=2`) or a JSON file.
    #[arg(long)]
    problem: Option<String>,

    /// Comma-separated values or `geom:lo:hi:count`.
    #[arg(long = "n", value_name = "LIST")]
    n: Option<String>,

    /// Relaxation slack `a > -1/2`.
    #[arg(long, allow_hyphen_values = true)]
    relax_a: Option<f64>,

    #[arg(long, value_enum)]
    output: Option<OutputFormat>,

    #[arg(long = "out", value_name = "PATH")]
    out: Option<PathBuf>,

    /// Constants for the dixon and compare-mcw tables.
    #[arg(long, value_enum)]
    constants: Option<ConstantSource>,

    /// Round reported thresholds up to integers.
    #[arg(long)]
    ceil: bool,
}

fn flags(kind: CommandKind, o: Opts) -> RunConfig {
    RunConfig {
        command: Some(kind),
        problem: o.problem,
        n_list: o.n.map(NList::Spec),
        relax_a: o.relax_a,
        output: o.output,
        out_path: o.out,
        constants: o.constants,
        ceil: o.ceil,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let from_flags = match cli.command {
        None => RunConfig::default(),
        Some(c) => match c {
            Command::Constants(o) => flags(CommandKind::Constants, o),
            Command::Threshold(o) => flags(CommandKind::Threshold, o),
            Command::Bracket(o) => flags(CommandKind::Bracket, o),
            Command::Verify(o) => flags(CommandKind::Verify, o),
            Command::Dixon(o) => flags(CommandKind::Dixon, o),
            Command::CompareMcw(o) => flags(CommandKind::CompareMcw, o),
            Command::Local(o) => flags(CommandKind::Local, o),
        },
    };
    let cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(file) => file.merged(from_flags),
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
        None => from_flags,
    };
    match commands::run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: a certified bracket does not contain its oracle value");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
