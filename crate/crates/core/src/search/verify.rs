//! Independent re-checking of models with the reference evaluator.

use crate::embed::{frame_constraint, Embedder, PredicateMode, QuantMode};
use crate::kernel::{eval_with_ceiling, Assignment, Denotation, KripkeModel};
use crate::syntax::Theory;

use super::SearchError;

/// Outcome of checking a model against a theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub frame_ok: bool,
    /// Rigid predicates have world-independent values.
    pub rigidity_ok: bool,
    /// Possibilist models use the total existence map.
    pub existence_ok: bool,
    pub failed_axioms: Vec<String>,
    /// Validity of the requested conjecture, if any.
    pub conjecture_valid: Option<bool>,
}

impl Verification {
    /// The model belongs to the model class and satisfies every axiom.
    pub fn is_model(&self) -> bool {
        self.frame_ok && self.rigidity_ok && self.existence_ok && self.failed_axioms.is_empty()
    }

    /// A model of the axioms on which the conjecture is not valid.
    pub fn is_counterexample(&self) -> bool {
        self.is_model() && self.conjecture_valid == Some(false)
    }
}

fn world_constant(d: &Denotation) -> bool {
    match d.as_table() {
        Some(entries) => entries.windows(2).all(|p| p[0] == p[1]),
        None => true,
    }
}

/// Evaluates every axiom (and optionally a conjecture) of `theory` on
/// `model` with the reference evaluator.
pub fn verify(
    theory: &Theory,
    model: &KripkeModel,
    conjecture: Option<&str>,
    ceiling: u64,
) -> Result<Verification, SearchError> {
    let embedder = Embedder::for_theory(theory);
    let valid = |f| -> Result<bool, SearchError> {
        let term = embedder.embed_valid(f)?;
        let v = eval_with_ceiling(&term, model, &Assignment::new(), ceiling)?;
        Ok(v.as_bool() == Some(true))
    };
    let mut failed_axioms = Vec::new();
    for a in &theory.axioms {
        if !valid(&a.formula)? {
            failed_axioms.push(a.name.clone());
        }
    }
    let conjecture_valid = match conjecture {
        Some(name) => {
            let s = theory
                .conjecture(name)
                .or_else(|| theory.axiom(name))
                .ok_or_else(|| SearchError::UnknownStatement(name.to_string()))?;
            Some(valid(&s.formula)?)
        }
        None => None,
    };
    let rigidity_ok = theory.predicates == PredicateMode::Flexible
        || theory
            .consts
            .iter()
            .filter(|c| c.ty.is_predicate())
            .all(|c| match model.interp.get(&c.name).and_then(Denotation::as_table) {
                Some(entries) => entries.iter().all(world_constant),
                None => false,
            });
    let existence_ok = theory.quant == QuantMode::Actualist || model.exists.iter().all(|row| row.iter().all(|&e| e));
    Ok(Verification {
        frame_ok: frame_constraint(model, theory.logic),
        rigidity_ok,
        existence_ok,
        failed_axioms,
        conjecture_valid,
    })
}
