//! Machine-readable reports, model serialization and text rendering.
//!
//! A report is a JSON object with the schema tag [`SCHEMA`]. Models are
//! stored with 0-based world and individual indices; constant values are
//! nested arrays mirroring the denotation tables (booleans at the leaves,
//! indices for worlds and individuals).

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::kernel::{Denotation, KripkeModel, SimpleType};
use crate::search::{Bounds, SearchStats, Verdict, VerdictKind};
use crate::syntax::{SurfaceType, Theory};

pub const SCHEMA: &str = "omv-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema `{0}` (expected `{SCHEMA}`)")]
    Schema(String),
    #[error("report has no model")]
    NoModel,
    #[error("model does not match the theory: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsJson {
    pub max_worlds: usize,
    pub max_individuals: usize,
    pub timeout_secs: Option<f64>,
    pub ceiling: u64,
}

impl From<&Bounds> for BoundsJson {
    fn from(b: &Bounds) -> Self {
        Self {
            max_worlds: b.max_worlds,
            max_individuals: b.max_individuals,
            timeout_secs: b.timeout.map(|t| t.as_secs_f64()),
            ceiling: b.ceiling,
        }
    }
}

/// Extension of a property: individuals having it, per world.
pub type Extension = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub property: Extension,
    /// Worlds at which the property is in the constant's extension.
    pub worlds: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstJson {
    #[serde(rename = "type")]
    pub ty: String,
    pub value: Value,
    /// For predicates of properties: the properties in the extension at
    /// some world.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Member>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub worlds: usize,
    pub individuals: usize,
    /// Pairs `[u, v]` with `v` reachable from `u`.
    pub access: Vec<[usize; 2]>,
    /// Individuals existing at each world.
    pub exists: Vec<Vec<usize>>,
    pub constants: BTreeMap<String, ConstJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decisions {
    pub rigid_predicates: bool,
    pub global_consequence: bool,
    pub size_order: String,
}

impl Decisions {
    pub fn for_theory(theory: &Theory) -> Self {
        Self {
            rigid_predicates: theory.predicates == crate::embed::PredicateMode::Rigid,
            global_consequence: true,
            size_order: "worlds, then individuals".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema: String,
    #[serde(default)]
    pub tool_version: String,
    #[serde(default)]
    pub theory_id: String,
    #[serde(default)]
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicates: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjecture: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<String>,
    /// Settings given on the command line that differ from the theory file.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsJson>,
    pub verdict: VerdictKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count_at_minimal: Option<u64>,
    #[serde(default)]
    pub model: Option<ModelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<SearchStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decisions: Option<Decisions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Explanation attached to verdicts that only speak about bounded sizes.
pub fn bounded_note(kind: VerdictKind) -> Option<String> {
    match kind {
        VerdictKind::UnsatisfiableUpTo => Some(
            "no model exists within the bounds; this is evidence, not a proof of inconsistency".into(),
        ),
        VerdictKind::NoCounterexampleUpTo => Some(
            "no countermodel exists within the bounds; this is evidence, not a proof of entailment".into(),
        ),
        _ => None,
    }
}

impl JsonReport {
    pub fn new(theory: &Theory, command: &str, conjecture: Option<&str>, bounds: &Bounds, verdict: &Verdict) -> Self {
        let count_at_minimal = match verdict {
            Verdict::ModelFound { count_at_minimal, .. } => Some(*count_at_minimal),
            _ => None,
        };
        Self {
            schema: SCHEMA.into(),
            tool_version: TOOL_VERSION.into(),
            theory_id: theory.name.clone(),
            command: command.into(),
            logic: Some(theory.logic.to_string()),
            quant: Some(theory.quant.to_string()),
            predicates: Some(theory.predicates.to_string()),
            conjecture: conjecture.map(str::to_string),
            premises: Vec::new(),
            overrides: BTreeMap::new(),
            bounds: Some(bounds.into()),
            verdict: verdict.kind(),
            count_at_minimal,
            model: verdict.model().map(|m| model_to_json(theory, m)),
            stats: Some(*verdict.stats()),
            decisions: Some(Decisions::for_theory(theory)),
            note: bounded_note(verdict.kind()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn parse(text: &str) -> Result<Self, ReportError> {
        let r: JsonReport = serde_json::from_str(text)?;
        if r.schema != SCHEMA {
            return Err(ReportError::Schema(r.schema));
        }
        Ok(r)
    }
}

fn denotation_to_json(d: &Denotation) -> Value {
    match d {
        Denotation::Bool(b) => Value::Bool(*b),
        Denotation::World(i) | Denotation::Indiv(i) => Value::from(*i),
        Denotation::Table(t) => Value::Array(t.iter().map(denotation_to_json).collect()),
    }
}

fn denotation_from_json(v: &Value, ty: &SimpleType, w: usize, d: usize) -> Result<Denotation, ReportError> {
    let bad = || ReportError::Mismatch(format!("`{v}` is not a value of type {ty}"));
    match ty {
        SimpleType::Bool => v.as_bool().map(Denotation::Bool).ok_or_else(bad),
        SimpleType::World => match v.as_u64() {
            Some(i) if (i as usize) < w => Ok(Denotation::World(i as usize)),
            _ => Err(bad()),
        },
        SimpleType::Indiv => match v.as_u64() {
            Some(i) if (i as usize) < d => Ok(Denotation::Indiv(i as usize)),
            _ => Err(bad()),
        },
        SimpleType::Fun(a, b) => {
            let entries = v.as_array().ok_or_else(bad)?;
            let n = a.space_size(w as u64, d as u64).ok_or_else(bad)?;
            if entries.len() as u64 != n {
                return Err(bad());
            }
            entries
                .iter()
                .map(|e| denotation_from_json(e, b, w, d))
                .collect::<Result<Vec<_>, _>>()
                .map(Denotation::Table)
        }
    }
}

/// Individuals having property `prop` at each world.
fn extension(prop: &Denotation, w: usize, d: usize) -> Extension {
    let table = prop.as_table().unwrap_or(&[]);
    (0..w)
        .map(|world| {
            (0..d)
                .filter(|&x| {
                    table
                        .get(x)
                        .and_then(Denotation::as_table)
                        .and_then(|t| t.get(world))
                        .and_then(Denotation::as_bool)
                        == Some(true)
                })
                .collect()
        })
        .collect()
}

fn members(den: &Denotation, w: usize, d: usize) -> Vec<Member> {
    let prop_ty = SimpleType::property();
    let table = den.as_table().unwrap_or(&[]);
    table
        .iter()
        .enumerate()
        .filter_map(|(code, entry)| {
            let worlds: Vec<usize> = (0..w)
                .filter(|&world| {
                    entry.as_table().and_then(|t| t.get(world)).and_then(Denotation::as_bool) == Some(true)
                })
                .collect();
            if worlds.is_empty() {
                return None;
            }
            let prop = Denotation::from_index(&prop_ty, w, d, code as u64);
            Some(Member {
                property: extension(&prop, w, d),
                worlds,
            })
        })
        .collect()
}

pub fn model_to_json(theory: &Theory, m: &KripkeModel) -> ModelJson {
    let mut constants = BTreeMap::new();
    for c in &theory.consts {
        let Some(den) = m.interp.get(&c.name) else { continue };
        let members = (c.ty == SurfaceType::collection()).then(|| members(den, m.worlds, m.individuals));
        constants.insert(
            c.name.clone(),
            ConstJson {
                ty: c.ty.to_string(),
                value: denotation_to_json(den),
                members,
            },
        );
    }
    ModelJson {
        worlds: m.worlds,
        individuals: m.individuals,
        access: m.access_pairs().into_iter().map(|(u, v)| [u, v]).collect(),
        exists: (0..m.worlds).map(|w| m.existing_at(w)).collect(),
        constants,
    }
}

pub fn model_from_json(theory: &Theory, j: &ModelJson) -> Result<KripkeModel, ReportError> {
    let (w, d) = (j.worlds, j.individuals);
    let mut access = vec![vec![false; w]; w];
    for &[u, v] in &j.access {
        if u >= w || v >= w {
            return Err(ReportError::Mismatch(format!("access pair [{u}, {v}] names a missing world")));
        }
        access[u][v] = true;
    }
    if j.exists.len() != w {
        return Err(ReportError::Mismatch(format!("existence lists for {} worlds, expected {w}", j.exists.len())));
    }
    let mut exists = vec![vec![false; d]; w];
    for (world, xs) in j.exists.iter().enumerate() {
        for &x in xs {
            if x >= d {
                return Err(ReportError::Mismatch(format!("individual {x} does not exist")));
            }
            exists[world][x] = true;
        }
    }
    let mut interp = BTreeMap::new();
    for c in &theory.consts {
        let cj = j
            .constants
            .get(&c.name)
            .ok_or_else(|| ReportError::Mismatch(format!("no value for constant `{}`", c.name)))?;
        interp.insert(c.name.clone(), denotation_from_json(&cj.value, &c.ty.to_kernel(), w, d)?);
    }
    if let Some(extra) = j.constants.keys().find(|k| theory.const_type(k).is_none()) {
        return Err(ReportError::Mismatch(format!("constant `{extra}` is not declared by the theory")));
    }
    KripkeModel::new(w, d, access, exists, interp, &theory.kernel_signature())
        .map_err(|e| ReportError::Mismatch(e.to_string()))
}

fn world_name(w: usize) -> String {
    format!("i{}", w + 1)
}

fn indiv_name(x: usize) -> String {
    format!("e{}", x + 1)
}

fn render_extension(ext: &Extension, d: usize) -> String {
    if ext.iter().all(|xs| xs.len() == d) {
        return "top".into();
    }
    if ext.iter().all(Vec::is_empty) {
        return "bot".into();
    }
    let parts: Vec<String> = ext
        .iter()
        .enumerate()
        .map(|(w, xs)| {
            let names: Vec<String> = xs.iter().map(|&x| indiv_name(x)).collect();
            let names = if names.is_empty() { "-".to_string() } else { names.join(",") };
            format!("{}:{}", world_name(w), names)
        })
        .collect();
    format!("{{{}}}", parts.join(" "))
}

/// ASCII rendering: worlds, arrows, existing individuals and the
/// properties in the extension of each property predicate.
pub fn render_model(theory: &Theory, m: &KripkeModel) -> String {
    let mut out = String::new();
    let worlds: Vec<String> = (0..m.worlds).map(world_name).collect();
    let indivs: Vec<String> = (0..m.individuals).map(indiv_name).collect();
    let _ = writeln!(out, "worlds: {}    individuals: {}", worlds.join(" "), indivs.join(" "));
    for u in 0..m.worlds {
        let succ: Vec<String> = (0..m.worlds).filter(|&v| m.access[u][v]).map(world_name).collect();
        let succ = if succ.is_empty() { "(none)".to_string() } else { succ.join(" ") };
        let exists: Vec<String> = m.existing_at(u).into_iter().map(indiv_name).collect();
        let _ = writeln!(out, "  {} --> {:<12} exists: {}", world_name(u), succ, exists.join(" "));
    }
    for c in &theory.consts {
        let Some(den) = m.interp.get(&c.name) else { continue };
        if c.ty == SurfaceType::collection() {
            let ms = members(den, m.worlds, m.individuals);
            let _ = writeln!(out, "  {} (properties in the extension, by world):", c.name);
            for w in 0..m.worlds {
                let here: Vec<String> = ms
                    .iter()
                    .filter(|mem| mem.worlds.contains(&w))
                    .map(|mem| render_extension(&mem.property, m.individuals))
                    .collect();
                let here = if here.is_empty() { "(none)".to_string() } else { here.join(" ") };
                let _ = writeln!(out, "    at {}: {}", world_name(w), here);
            }
        } else {
            let _ = writeln!(out, "  {} = {}", c.name, den);
        }
    }
    out
}

/// One-paragraph human summary of a verdict.
pub fn render_verdict(theory: &Theory, verdict: &Verdict) -> String {
    let mut out = String::new();
    let stats = verdict.stats();
    match verdict {
        Verdict::ModelFound { model, count_at_minimal, .. } => {
            let _ = writeln!(
                out,
                "ModelFound: {} world(s), {} individual(s); {} model(s) at this size",
                model.worlds, model.individuals, count_at_minimal
            );
            out.push_str(&render_model(theory, model));
        }
        Verdict::CounterexampleFound { model, conjecture, .. } => {
            let _ = writeln!(
                out,
                "CounterexampleFound: {conjecture} fails in a model with {} world(s), {} individual(s)",
                model.worlds, model.individuals
            );
            out.push_str(&render_model(theory, model));
        }
        Verdict::NoCounterexampleUpTo { bounds, .. } => {
            let _ = writeln!(out, "NoCounterexampleUpTo({bounds})");
        }
        Verdict::UnsatisfiableUpTo { bounds, .. } => {
            let _ = writeln!(out, "UnsatisfiableUpTo({bounds})");
        }
        Verdict::TimedOut { .. } => {
            let _ = writeln!(out, "TimedOut");
        }
    }
    if let Some(note) = bounded_note(verdict.kind()) {
        let _ = writeln!(out, "note: {note}");
    }
    let _ = writeln!(
        out,
        "models examined: {}, search nodes: {}, {} ms",
        stats.models_examined, stats.nodes, stats.wall_ms
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{find_model, Bounds};
    use crate::syntax::parse_theory;

    const SRC: &str = "theory t\nlogic KT\npredicates flexible\nconst P : (i>wo)>wo\nconst c : i\naxiom a : P (\\x. top)\n";

    #[test]
    fn model_round_trip() {
        let t = parse_theory(SRC).unwrap();
        let v = find_model(&t, &Bounds::new(2, 2)).unwrap();
        let m = v.model().unwrap();
        let report = JsonReport::new(&t, "find-model", None, &Bounds::new(2, 2), &v);
        let back = JsonReport::parse(&report.to_json()).unwrap();
        assert_eq!(back, report);
        assert_eq!(&model_from_json(&t, back.model.as_ref().unwrap()).unwrap(), m);
    }

    #[test]
    fn rejects_foreign_schema_and_bad_values() {
        assert!(matches!(
            JsonReport::parse(r#"{"schema":"other","verdict":"ModelFound"}"#),
            Err(ReportError::Schema(_))
        ));
        let t = parse_theory(SRC).unwrap();
        let j = ModelJson {
            worlds: 1,
            individuals: 1,
            access: vec![[0, 1]],
            exists: vec![vec![0]],
            constants: BTreeMap::new(),
        };
        assert!(model_from_json(&t, &j).is_err());
    }

    #[test]
    fn diagram_mentions_worlds_and_top() {
        let t = parse_theory(SRC).unwrap();
        let v = find_model(&t, &Bounds::new(1, 1)).unwrap();
        let text = render_model(&t, v.model().unwrap());
        assert!(text.contains("i1 -->"), "{text}");
        assert!(text.contains("top"), "{text}");
    }
}
