//! Built-in theory corpus and the expectation suite over it.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{Embedder, FrameClass, PredicateMode, QuantMode};
use crate::kernel::{eval_with_ceiling, Assignment, KripkeModel};
use crate::parallel::map_ordered;
use crate::report::{model_to_json, BoundsJson, ModelJson};
use crate::search::{check_entailment, find_model, Bounds, SearchStats, Verdict, VerdictKind};
use crate::syntax::{parse_formula, parse_theory, DeclContext, SourceError, Theory};

pub const SUITE_SCHEMA: &str = "omv-suite/1";

/// Source text of the expectation manifest.
pub const MANIFEST: &str = include_str!("../../theories/manifest.toml");

const SOURCES: &[(&str, &str)] = &[
    ("scott_kb_possibilist", include_str!("../../theories/scott_kb_possibilist.mthy")),
    ("scott_kb_actualist", include_str!("../../theories/scott_kb_actualist.mthy")),
    ("godel_kb_possibilist", include_str!("../../theories/godel_kb_possibilist.mthy")),
    ("godel_kb_actualist", include_str!("../../theories/godel_kb_actualist.mthy")),
    ("simplified_k", include_str!("../../theories/simplified_k.mthy")),
    ("simplified_k_actualist", include_str!("../../theories/simplified_k_actualist.mthy")),
    ("simplified_kt", include_str!("../../theories/simplified_kt.mthy")),
    ("simplified_kt_actualist", include_str!("../../theories/simplified_kt_actualist.mthy")),
    ("simplified_k_empty", include_str!("../../theories/simplified_k_empty.mthy")),
    ("scott_a3p_kb", include_str!("../../theories/scott_a3p_kb.mthy")),
    ("simplified_a3p_k", include_str!("../../theories/simplified_a3p_k.mthy")),
];

/// Source text of a built-in theory.
pub fn builtin_source(id: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(n, _)| *n == id).map(|(_, s)| *s)
}

pub fn builtin_ids() -> Vec<&'static str> {
    SOURCES.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_theory(id: &str) -> Option<Theory> {
    builtin_source(id).map(|s| parse_theory(s).expect("built-in theories parse"))
}

/// Every built-in theory, in a fixed order.
pub fn builtin_theories() -> Vec<Theory> {
    SOURCES
        .iter()
        .map(|(_, s)| parse_theory(s).expect("built-in theories parse"))
        .collect()
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("manifest: {0}")]
    Manifest(#[from] toml::de::Error),
    #[error("manifest version {0} is not supported")]
    Version(u32),
    #[error("case `{case}`: {message}")]
    InvalidCase { case: String, message: String },
    #[error("no suite case or theory matches `{0}`")]
    UnknownSelection(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    FindModel,
    Entail,
    Refute,
}

/// Constraints on the model in a verdict.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shape {
    pub worlds: Option<usize>,
    pub individuals: Option<usize>,
    pub access: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub valid: Vec<String>,
    #[serde(default)]
    pub invalid: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Defaults {
    max_worlds: usize,
    max_individuals: usize,
    timeout_secs: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseEntry {
    id: String,
    theory: String,
    check: CheckKind,
    conjecture: Option<String>,
    premises: Option<Vec<String>>,
    logic: Option<String>,
    quant: Option<String>,
    predicates: Option<String>,
    expected: VerdictKind,
    max_worlds: Option<usize>,
    max_individuals: Option<usize>,
    timeout_secs: Option<u64>,
    provenance: String,
    shape: Option<Shape>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    version: u32,
    defaults: Defaults,
    #[serde(rename = "case", default)]
    cases: Vec<CaseEntry>,
}

/// A resolved suite case: the theory already carries premise and header
/// overrides.
#[derive(Debug, Clone)]
pub struct SuiteCase {
    pub id: String,
    pub theory_id: String,
    pub theory: Theory,
    pub check: CheckKind,
    pub conjecture: Option<String>,
    pub premises: Vec<String>,
    pub expected: VerdictKind,
    pub bounds: Bounds,
    pub provenance: String,
    pub shape: Option<Shape>,
}

impl SuiteCase {
    pub fn logic(&self) -> FrameClass {
        self.theory.logic
    }

    pub fn quant(&self) -> QuantMode {
        self.theory.quant
    }

    /// The same case under another quantifier mode.
    pub fn with_quant(&self, quant: QuantMode) -> SuiteCase {
        SuiteCase {
            theory: self.theory.clone().with_quant(quant),
            ..self.clone()
        }
    }

    pub fn run(&self) -> Result<Verdict, crate::search::SearchError> {
        match (&self.check, &self.conjecture) {
            (CheckKind::FindModel, _) => find_model(&self.theory, &self.bounds),
            (_, Some(c)) => check_entailment(&self.theory, c, &self.bounds),
            (_, None) => unreachable!("validated when loading"),
        }
    }
}

fn invalid(case: &str, message: impl Into<String>) -> SuiteError {
    SuiteError::InvalidCase {
        case: case.to_string(),
        message: message.into(),
    }
}

/// Parses and validates a manifest against the built-in corpus.
pub fn load_manifest(text: &str) -> Result<Vec<SuiteCase>, SuiteError> {
    let file: ManifestFile = toml::from_str(text)?;
    if file.version != 1 {
        return Err(SuiteError::Version(file.version));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in file.cases {
        if !seen.insert(c.id.clone()) {
            return Err(invalid(&c.id, "duplicate id"));
        }
        if c.provenance.trim().is_empty() {
            return Err(invalid(&c.id, "empty provenance"));
        }
        if c.expected == VerdictKind::TimedOut {
            return Err(invalid(&c.id, "TimedOut cannot be an expectation"));
        }
        let mut theory =
            builtin_theory(&c.theory).ok_or_else(|| invalid(&c.id, format!("unknown theory `{}`", c.theory)))?;
        if let Some(l) = &c.logic {
            theory = theory.with_logic(l.parse().map_err(|m: String| invalid(&c.id, m))?);
        }
        if let Some(q) = &c.quant {
            theory = theory.with_quant(q.parse().map_err(|m: String| invalid(&c.id, m))?);
        }
        if let Some(p) = &c.predicates {
            theory = theory.with_predicates(p.parse::<PredicateMode>().map_err(|m| invalid(&c.id, m))?);
        }
        match (c.check, &c.conjecture) {
            (CheckKind::FindModel, Some(_)) => return Err(invalid(&c.id, "find_model takes no conjecture")),
            (CheckKind::Entail | CheckKind::Refute, None) => return Err(invalid(&c.id, "missing conjecture")),
            (_, Some(name)) if theory.statement(name).is_none() => {
                return Err(invalid(&c.id, format!("unknown statement `{name}`")))
            }
            _ => {}
        }
        let premises = c.premises.unwrap_or_default();
        if !premises.is_empty() {
            theory = theory
                .with_premises(&premises)
                .map_err(|p| invalid(&c.id, format!("unknown premise `{p}`")))?;
        }
        let timeout = c.timeout_secs.or(file.defaults.timeout_secs).map(Duration::from_secs);
        let bounds = Bounds {
            max_worlds: c.max_worlds.unwrap_or(file.defaults.max_worlds),
            max_individuals: c.max_individuals.unwrap_or(file.defaults.max_individuals),
            timeout,
            ..Bounds::default()
        };
        out.push(SuiteCase {
            id: c.id,
            theory_id: c.theory,
            theory,
            check: c.check,
            conjecture: c.conjecture,
            premises,
            expected: c.expected,
            bounds,
            provenance: c.provenance,
            shape: c.shape,
        });
    }
    Ok(out)
}

/// The built-in expectation table.
pub fn builtin_cases() -> Vec<SuiteCase> {
    load_manifest(MANIFEST).expect("the built-in manifest is valid")
}

/// Cases matching a selection: `all`, a case id, a theory id, or a prefix
/// of theory ids ending at an underscore (`scott_kb` selects
/// `scott_kb_possibilist` and `scott_kb_actualist`). The empty selection
/// selects nothing.
pub fn select(cases: &[SuiteCase], selection: &str) -> Result<Vec<SuiteCase>, SuiteError> {
    if selection.is_empty() {
        return Ok(Vec::new());
    }
    let prefix = format!("{selection}_");
    let chosen: Vec<SuiteCase> = cases
        .iter()
        .filter(|c| {
            selection == "all" || c.id == selection || c.theory_id == selection || c.theory_id.starts_with(&prefix)
        })
        .cloned()
        .collect();
    if chosen.is_empty() {
        return Err(SuiteError::UnknownSelection(selection.to_string()));
    }
    Ok(chosen)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Timeout,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub theory: String,
    pub logic: FrameClass,
    pub quant: QuantMode,
    pub predicates: PredicateMode,
    pub check: CheckKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjecture: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub premises: Vec<String>,
    pub expected: VerdictKind,
    pub actual: Option<VerdictKind>,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub bounds: BoundsJson,
    pub provenance: String,
    pub stats: Option<SearchStats>,
    pub model: Option<ModelJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub cases: Vec<CaseReport>,
    pub passed: usize,
    pub failed: usize,
    pub timed_out: usize,
    pub errors: usize,
    pub wall_ms: u64,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.cases.len()
    }

    /// The report with every timing field zeroed.
    pub fn without_timing(&self) -> SuiteReport {
        let mut r = self.clone();
        r.wall_ms = 0;
        for c in &mut r.cases {
            if let Some(s) = &mut c.stats {
                s.wall_ms = 0;
            }
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Checks a verdict's model against a shape; returns the first violation.
pub fn check_shape(theory: &Theory, model: &KripkeModel, shape: &Shape, ceiling: u64) -> Result<(), String> {
    if let Some(w) = shape.worlds {
        if model.worlds != w {
            return Err(format!("expected {w} world(s), found {}", model.worlds));
        }
    }
    if let Some(d) = shape.individuals {
        if model.individuals != d {
            return Err(format!("expected {d} individual(s), found {}", model.individuals));
        }
    }
    if let Some(pairs) = &shape.access {
        let found: Vec<[usize; 2]> = model.access_pairs().into_iter().map(|(u, v)| [u, v]).collect();
        if &found != pairs {
            return Err(format!("expected accessibility {pairs:?}, found {found:?}"));
        }
    }
    let ctx = DeclContext::of(theory);
    let embedder = Embedder::for_theory(theory);
    let valid = |src: &str| -> Result<bool, String> {
        let f = parse_formula(src, &ctx).map_err(|e: SourceError| format!("`{src}`: {e}"))?;
        let t = embedder.embed_valid(&f).map_err(|e| e.to_string())?;
        let v = eval_with_ceiling(&t, model, &Assignment::new(), ceiling).map_err(|e| e.to_string())?;
        Ok(v.as_bool() == Some(true))
    };
    for src in &shape.valid {
        if !valid(src)? {
            return Err(format!("`{src}` is not valid in the model"));
        }
    }
    for src in &shape.invalid {
        if valid(src)? {
            return Err(format!("`{src}` is valid in the model"));
        }
    }
    Ok(())
}

/// Runs one case and grades it.
pub fn run_case(case: &SuiteCase) -> CaseReport {
    let result = case.run();
    let (actual, outcome, detail, stats, model) = match result {
        Err(e) => (None, Outcome::Error, Some(e.to_string()), None, None),
        Ok(v) => {
            let kind = v.kind();
            let stats = Some(*v.stats());
            let model = v.model().map(|m| model_to_json(&case.theory, m));
            let (outcome, detail) = if kind == VerdictKind::TimedOut {
                (Outcome::Timeout, Some("search timed out".to_string()))
            } else if kind != case.expected {
                (Outcome::Fail, Some(format!("expected {}, got {kind}", case.expected)))
            } else {
                match (&case.shape, v.model()) {
                    (Some(shape), Some(m)) => match check_shape(&case.theory, m, shape, case.bounds.ceiling) {
                        Ok(()) => (Outcome::Pass, None),
                        Err(why) => (Outcome::Fail, Some(why)),
                    },
                    _ => (Outcome::Pass, None),
                }
            };
            (Some(kind), outcome, detail, stats, model)
        }
    };
    CaseReport {
        id: case.id.clone(),
        theory: case.theory_id.clone(),
        logic: case.theory.logic,
        quant: case.theory.quant,
        predicates: case.theory.predicates,
        check: case.check,
        conjecture: case.conjecture.clone(),
        premises: case.premises.clone(),
        expected: case.expected,
        actual,
        outcome,
        detail,
        bounds: (&case.bounds).into(),
        provenance: case.provenance.clone(),
        stats,
        model,
    }
}

/// Optional limits applied on top of the manifest's bounds.
#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub timeout: Option<Option<Duration>>,
    pub max_worlds: Option<usize>,
    pub max_individuals: Option<usize>,
}

impl SuiteOptions {
    fn apply(&self, case: &mut SuiteCase) {
        if let Some(t) = self.timeout {
            case.bounds.timeout = t;
        }
        if let Some(w) = self.max_worlds {
            case.bounds.max_worlds = case.bounds.max_worlds.min(w);
        }
        if let Some(d) = self.max_individuals {
            case.bounds.max_individuals = case.bounds.max_individuals.min(d);
        }
    }
}

/// Runs the selected cases of the built-in manifest. Cases run in
/// parallel; the report lists them in manifest order.
pub fn run_suite(selection: &str, options: &SuiteOptions) -> Result<SuiteReport, SuiteError> {
    let mut cases = select(&builtin_cases(), selection)?;
    cases.iter_mut().for_each(|c| options.apply(c));
    Ok(run_cases(&cases))
}

pub fn run_cases(cases: &[SuiteCase]) -> SuiteReport {
    let start = Instant::now();
    let reports = map_ordered(cases, |_, c| run_case(c));
    let count = |o: Outcome| reports.iter().filter(|r| r.outcome == o).count();
    SuiteReport {
        schema: SUITE_SCHEMA.into(),
        passed: count(Outcome::Pass),
        failed: count(Outcome::Fail),
        timed_out: count(Outcome::Timeout),
        errors: count(Outcome::Error),
        cases: reports,
        wall_ms: start.elapsed().as_millis() as u64,
    }
}
