use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use omv_core::kernel::KernelError;
use omv_core::parallel::{available_jobs, with_jobs};
use omv_core::report::{model_from_json, render_model, render_verdict, JsonReport, ReportError};
use omv_core::search::{check_entailment, find_model, verify, Bounds, SearchError, VerdictKind};
use omv_core::suite::{builtin_cases, builtin_ids, builtin_source, run_suite, Outcome, SuiteError, SuiteOptions};
use omv_core::syntax::{print_theory, SourceError};
use omv_core::{parse_theory, Embedder, Theory};
use thiserror::Error;

use crate::{Cli, Command, SearchArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: SourceError },
    #[error("unknown built-in theory `{0}`")]
    UnknownBuiltin(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Suite(#[from] SuiteError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Search(SearchError::CandidateOverflow { .. })
            | CliError::Search(SearchError::Kernel(KernelError::BoundOverflow { .. })) => 3,
            _ => 2,
        }
    }
}

/// Exit code of a search command, as a function of the verdict kind.
pub fn exit_code(command: &str, kind: VerdictKind) -> u8 {
    use VerdictKind::*;
    match (command, kind) {
        (_, TimedOut) => 3,
        ("find-model", ModelFound) | ("entail", NoCounterexampleUpTo) | ("refute", CounterexampleFound) => 0,
        _ => 1,
    }
}

fn load_theory(spec: &str) -> Result<Theory, CliError> {
    let (path, text) = match spec.strip_prefix("builtin:") {
        Some(id) => (
            spec.to_string(),
            builtin_source(id)
                .ok_or_else(|| CliError::UnknownBuiltin(id.to_string()))?
                .to_string(),
        ),
        None => (
            spec.to_string(),
            fs::read_to_string(spec).map_err(|source| CliError::Io {
                path: spec.to_string(),
                source,
            })?,
        ),
    };
    parse_theory(&text).map_err(|source| CliError::Parse { path, source })
}

fn write_json(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn jobs(j: Option<u64>) -> usize {
    j.map_or_else(available_jobs, |j| j as usize)
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Check { theory } => check(theory),
        Command::Parse { theory } => {
            print!("{}", print_theory(&load_theory(theory)?));
            Ok(0)
        }
        Command::FindModel { theory, search } => search_cmd("find-model", theory, None, search, cli.verbose),
        Command::Entail {
            theory,
            conjecture,
            search,
        } => search_cmd("entail", theory, Some(conjecture), search, cli.verbose),
        Command::Refute {
            theory,
            conjecture,
            search,
        } => search_cmd("refute", theory, Some(conjecture), search, cli.verbose),
        Command::Suite {
            selection,
            list,
            timeout,
            max_worlds,
            max_indiv,
            jobs: j,
            json,
        } => {
            if *list {
                return list_suite();
            }
            let options = SuiteOptions {
                timeout: timeout.map(|t| Some(Duration::from_secs(t))),
                max_worlds: max_worlds.map(|w| w as usize),
                max_individuals: max_indiv.map(|d| d as usize),
            };
            suite(selection, &options, jobs(*j), json.as_deref(), cli.verbose)
        }
        Command::VerifyModel { report, theory } => verify_model(report, theory.as_deref(), cli.verbose),
    }
}

fn check(spec: &str) -> Result<u8, CliError> {
    let theory = load_theory(spec)?;
    let embedder = Embedder::for_theory(&theory);
    for s in theory.axioms.iter().chain(&theory.conjectures) {
        embedder.embed_valid(&s.formula).map_err(|e| CliError::Usage(format!("{spec}: {}: {e}", s.name)))?;
    }
    println!(
        "{}: ok ({} constant(s), {} definition(s), {} axiom(s), {} conjecture(s); logic {}, {}, {} predicates)",
        theory.name,
        theory.consts.len(),
        theory.defs.len(),
        theory.axioms.len(),
        theory.conjectures.len(),
        theory.logic,
        theory.quant,
        theory.predicates
    );
    Ok(0)
}

fn search_cmd(
    command: &str,
    spec: &str,
    conjecture: Option<&String>,
    args: &SearchArgs,
    verbose: bool,
) -> Result<u8, CliError> {
    let mut theory = load_theory(spec)?;
    let mut overrides = std::collections::BTreeMap::new();
    if let Some(l) = args.logic {
        if l != theory.logic {
            overrides.insert("logic".to_string(), l.to_string());
        }
        theory = theory.with_logic(l);
    }
    if let Some(q) = args.quant {
        if q != theory.quant {
            overrides.insert("quant".to_string(), q.to_string());
        }
        theory = theory.with_quant(q);
    }
    if let Some(p) = args.predicates {
        if p != theory.predicates {
            overrides.insert("predicates".to_string(), p.to_string());
        }
        theory = theory.with_predicates(p);
    }
    if !args.premises.is_empty() {
        theory = theory
            .with_premises(&args.premises)
            .map_err(|p| CliError::Usage(format!("no statement named `{p}`")))?;
    }
    let bounds = Bounds::new(args.max_worlds as usize, args.max_indiv as usize)
        .with_timeout(Some(Duration::from_secs(args.timeout)));
    let verdict = with_jobs(jobs(args.jobs), || match conjecture {
        Some(c) => check_entailment(&theory, c, &bounds),
        None => find_model(&theory, &bounds),
    })?;
    print!("{}", render_verdict(&theory, &verdict));
    if verbose {
        println!(
            "theory {} (logic {}, {}, {} predicates), bounds {bounds}, {} worker(s)",
            theory.name,
            theory.logic,
            theory.quant,
            theory.predicates,
            jobs(args.jobs)
        );
        for (k, v) in &overrides {
            println!("override {k} = {v}");
        }
    }
    if let Some(path) = &args.json {
        let mut report = JsonReport::new(&theory, command, conjecture.map(String::as_str), &bounds, &verdict);
        report.premises = args.premises.clone();
        report.overrides = overrides;
        write_json(path, &report.to_json())?;
    }
    Ok(exit_code(command, verdict.kind()))
}

fn list_suite() -> Result<u8, CliError> {
    println!("theories:");
    for id in builtin_ids() {
        println!("  {id}");
    }
    println!("cases:");
    for c in builtin_cases() {
        let what = c.conjecture.as_deref().unwrap_or("-");
        println!("  {:<42} {:<10} {:<14} {}", c.id, format!("{:?}", c.check), what, c.expected);
    }
    Ok(0)
}

fn suite(
    selection: &str,
    options: &SuiteOptions,
    jobs: usize,
    json: Option<&Path>,
    verbose: bool,
) -> Result<u8, CliError> {
    let report = with_jobs(jobs, || run_suite(selection, options))?;
    for c in &report.cases {
        let tag = match c.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Timeout => "TIME",
            Outcome::Error => "ERR ",
        };
        let actual = c.actual.map_or("-".to_string(), |k| k.to_string());
        let ms = c.stats.map_or(0, |s| s.wall_ms);
        println!("{tag} {:<42} {:<22} {:>7} ms", c.id, actual, ms);
        if let Some(d) = &c.detail {
            println!("     {d}");
        }
        if verbose {
            println!("     {}", c.provenance);
        }
    }
    println!(
        "{} case(s): {} passed, {} failed, {} timed out, {} error(s)",
        report.cases.len(),
        report.passed,
        report.failed,
        report.timed_out,
        report.errors
    );
    if let Some(path) = json {
        write_json(path, &report.to_json())?;
    }
    Ok(if report.errors > 0 {
        2
    } else if report.failed > 0 {
        1
    } else if report.timed_out > 0 {
        3
    } else {
        0
    })
}

fn verify_model(path: &PathBuf, theory: Option<&str>, verbose: bool) -> Result<u8, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let report = JsonReport::parse(&text)?;
    let spec = match theory {
        Some(t) => t.to_string(),
        None => format!("builtin:{}", report.theory_id),
    };
    let mut theory = load_theory(&spec)?;
    let parse_field = |name: &str, e: String| CliError::Usage(format!("report field `{name}`: {e}"));
    if let Some(l) = &report.logic {
        theory = theory.with_logic(l.parse().map_err(|e| parse_field("logic", e))?);
    }
    if let Some(q) = &report.quant {
        theory = theory.with_quant(q.parse().map_err(|e| parse_field("quant", e))?);
    }
    if let Some(p) = &report.predicates {
        theory = theory.with_predicates(p.parse().map_err(|e| parse_field("predicates", e))?);
    }
    if !report.premises.is_empty() {
        theory = theory
            .with_premises(&report.premises)
            .map_err(|p| CliError::Usage(format!("no statement named `{p}`")))?;
    }
    let model_json = report.model.as_ref().ok_or(ReportError::NoModel)?;
    let model = model_from_json(&theory, model_json)?;
    let ceiling = report.bounds.as_ref().map_or(Bounds::default().ceiling, |b| b.ceiling);
    let conjecture = match report.verdict {
        VerdictKind::CounterexampleFound => {
            let c = report
                .conjecture
                .as_deref()
                .ok_or_else(|| CliError::Usage("counterexample report without a conjecture".into()))?;
            Some(c)
        }
        VerdictKind::ModelFound => None,
        other => return Err(CliError::Usage(format!("a {other} report carries no model to verify"))),
    };
    let v = verify(&theory, &model, conjecture, ceiling)?;
    print!("{}", render_model(&theory, &model));
    println!("frame {}: {}", theory.logic, if v.frame_ok { "ok" } else { "violated" });
    if !v.rigidity_ok {
        println!("rigid predicates vary between worlds");
    }
    if !v.existence_ok {
        println!("possibilist model with a partial existence map");
    }
    for a in &v.failed_axioms {
        println!("axiom {a} is not valid");
    }
    if verbose || conjecture.is_some() {
        if let (Some(c), Some(valid)) = (conjecture, v.conjecture_valid) {
            println!("conjecture {c}: {}", if valid { "valid" } else { "refuted" });
        }
    }
    let matches = match report.verdict {
        VerdictKind::CounterexampleFound => v.is_counterexample(),
        _ => v.is_model(),
    };
    println!("{}", if matches { "verified" } else { "verification failed" });
    Ok(if matches { 0 } else { 1 })
}
