//! `omv`: bounded model finding for higher-order modal theories.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use omv_core::{FrameClass, PredicateMode, QuantMode};

const AFTER_HELP: &str = "\
THEORIES:
  A theory is a path to a .mthy file or `builtin:ID`; `omv suite --list`
  shows the built-in ids.

LIMITS:
  Theories that quantify over collections of properties (the meet axiom
  variants) are only feasible at --max-worlds 2 --max-indiv 1: a collection
  quantifier enumerates 2^(2^(w*d)) candidates, and larger bounds exceed the
  per-quantifier ceiling of 2^24 and are rejected with exit code 3.

EXIT CODES:
  0  the check succeeded: a model was found (find-model), no countermodel
     exists within the bounds (entail), a countermodel was found (refute),
     every suite case passed, or a stored model re-verified as recorded
  1  the opposite outcome
  2  usage, parse, type or schema error
  3  timeout or a bound too large to search";

#[derive(Debug, Parser)]
#[command(name = "omv", version, about = "Bounded model finder for higher-order modal theories", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print search statistics and per-case details.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and type-check a theory.
    Check {
        theory: String,
    },
    /// Print a theory in normalized form.
    Parse {
        theory: String,
    },
    /// Search for the first model of a theory in canonical order.
    FindModel {
        theory: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Check that a conjecture has no countermodel within the bounds.
    Entail {
        theory: String,
        conjecture: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Look for a countermodel to a conjecture.
    Refute {
        theory: String,
        conjecture: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Run the built-in expectation suite.
    Suite {
        /// `all`, a case id, a theory id, or a theory id prefix.
        #[arg(default_value = "all")]
        selection: String,
        /// List the cases and theories instead of running them.
        #[arg(long)]
        list: bool,
        /// Cap the timeout of every case (seconds).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        timeout: Option<u64>,
        /// Cap the world bound of every case.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_worlds: Option<u64>,
        /// Cap the individual bound of every case.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_indiv: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        /// Write the suite report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Re-check a model stored in a JSON report.
    VerifyModel {
        report: PathBuf,
        /// Theory to check against; defaults to `builtin:` plus the
        /// report's theory id.
        #[arg(long)]
        theory: Option<String>,
    },
}

#[derive(Debug, Args, Clone)]
pub struct SearchArgs {
    /// Override the frame class of the theory.
    #[arg(long)]
    pub logic: Option<FrameClass>,
    /// Override the quantifier mode of the theory.
    #[arg(long)]
    pub quant: Option<QuantMode>,
    /// Override the interpretation of predicate constants.
    #[arg(long)]
    pub predicates: Option<PredicateMode>,
    /// Use only these statements as axioms (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub premises: Vec<String>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_worlds: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_indiv: u64,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 120, value_parser = clap::value_parser!(u64).range(1..))]
    pub timeout: u64,
    /// Search workers; defaults to the available parallelism.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Write a JSON report to this path.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
