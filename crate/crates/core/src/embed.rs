//! Shallow semantic embedding of higher-order modal logic into the
//! classical core.
//!
//! A surface formula of type `wo` becomes a kernel term of type
//! `World -> Bool`. Modal operators quantify over worlds reachable through
//! the distinguished constant `R`; actualist individual quantifiers are
//! guarded by the distinguished existence predicate `E`. Every binder in the
//! output gets a fresh name, so kernel terms never shadow.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::model::{access_type, exists_type, ACCESS, EXISTS};
use crate::kernel::{typecheck, KernelError, KripkeModel, NameSupply, SimpleType, Term, TypeContext};
use crate::syntax::ast::typing;
use crate::syntax::{print_formula, ConstDecl, Definition, Formula, Quantifier, SurfaceType, Theory};

/// Domain of individual quantifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantMode {
    /// Individual quantifiers range over the whole domain at every world.
    Possibilist,
    /// Individual quantifiers range over the individuals existing at the
    /// world of evaluation; all higher-order quantifiers stay possibilist.
    Actualist,
}

impl fmt::Display for QuantMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantMode::Possibilist => "possibilist",
            QuantMode::Actualist => "actualist",
        })
    }
}

impl FromStr for QuantMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "possibilist" => Ok(QuantMode::Possibilist),
            "actualist" => Ok(QuantMode::Actualist),
            other => Err(format!("unknown quantifier mode `{other}`")),
        }
    }
}

/// How constants of predicate type `τ>wo` are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredicateMode {
    /// One extension for all worlds: the truth value of `P a` does not
    /// depend on the world.
    Rigid,
    /// A separate extension at every world.
    Flexible,
}

impl fmt::Display for PredicateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PredicateMode::Rigid => "rigid",
            PredicateMode::Flexible => "flexible",
        })
    }
}

impl FromStr for PredicateMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rigid" => Ok(PredicateMode::Rigid),
            "flexible" => Ok(PredicateMode::Flexible),
            other => Err(format!("unknown predicate mode `{other}`")),
        }
    }
}

/// Frame classes, imposed as conditions on the accessibility relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameClass {
    K,
    KT,
    KB,
    S5,
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClass::K => "K",
            FrameClass::KT => "KT",
            FrameClass::KB => "KB",
            FrameClass::S5 => "S5",
        })
    }
}

impl FromStr for FrameClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "K" => Ok(FrameClass::K),
            "KT" => Ok(FrameClass::KT),
            "KB" => Ok(FrameClass::KB),
            "S5" => Ok(FrameClass::S5),
            other => Err(format!("unknown logic `{other}` (expected K, KT, KB or S5)")),
        }
    }
}

/// Whether the model's accessibility relation belongs to the frame class.
pub fn frame_constraint(model: &KripkeModel, frame: FrameClass) -> bool {
    match frame {
        FrameClass::K => true,
        FrameClass::KT => model.is_reflexive(),
        FrameClass::KB => model.is_symmetric(),
        FrameClass::S5 => model.is_reflexive() && model.is_symmetric() && model.is_transitive(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("definition `{0}` refers to itself or to a later definition")]
    RecursiveDefinition(String),
    #[error("sort error in `{location}`: {message}")]
    SortError { location: String, message: String },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn sort_error(f: &Formula, message: String) -> EmbedError {
    EmbedError::SortError {
        location: print_formula(f),
        message,
    }
}

/// Compiles surface formulas against a constant/definition signature.
#[derive(Debug, Clone)]
pub struct Embedder<'a> {
    consts: &'a [ConstDecl],
    defs: &'a [Definition],
    mode: QuantMode,
    free: Vec<(String, SurfaceType)>,
}

struct Scope {
    names: NameSupply,
    /// (surface name, kernel name, type), innermost last.
    bound: Vec<(String, String, SurfaceType)>,
    /// Number of definitions visible from the current position.
    visible_defs: usize,
}

impl<'a> Embedder<'a> {
    pub fn new(consts: &'a [ConstDecl], defs: &'a [Definition], mode: QuantMode) -> Self {
        Self {
            consts,
            defs,
            mode,
            free: Vec::new(),
        }
    }

    /// Embedder for a theory's signature under the theory's own mode.
    pub fn for_theory(theory: &'a Theory) -> Self {
        Self::new(&theory.consts, &theory.defs, theory.quant)
    }

    /// No constants or definitions.
    pub fn bare(mode: QuantMode) -> Embedder<'static> {
        Embedder::new(&[], &[], mode)
    }

    /// Allows a free variable, left free in the output term.
    pub fn with_free(mut self, name: impl Into<String>, ty: SurfaceType) -> Self {
        self.free.push((name.into(), ty));
        self
    }

    pub fn mode(&self) -> QuantMode {
        self.mode
    }

    /// Kernel typing context: declared constants, free variables, `R`, `E`.
    pub fn type_context(&self) -> TypeContext {
        let mut ctx: TypeContext = HashMap::new();
        ctx.insert(ACCESS.to_string(), access_type());
        ctx.insert(EXISTS.to_string(), exists_type());
        for c in self.consts {
            ctx.insert(c.name.clone(), c.ty.to_kernel());
        }
        for (n, ty) in &self.free {
            ctx.insert(n.clone(), ty.to_kernel());
        }
        ctx
    }

    fn scope(&self) -> Scope {
        Scope {
            names: NameSupply::new(),
            bound: Vec::new(),
            visible_defs: self.defs.len(),
        }
    }

    /// Embeds a formula of type `wo` into a term of type `World -> Bool`.
    pub fn embed(&self, f: &Formula) -> Result<Term, EmbedError> {
        let (term, ty) = self.embed_term(f)?;
        typing::expect_prop("a theory statement", &ty).map_err(|m| sort_error(f, m))?;
        Ok(term)
    }

    /// Embeds a surface term of any type, returning it with its type.
    pub fn embed_term(&self, f: &Formula) -> Result<(Term, SurfaceType), EmbedError> {
        let mut scope = self.scope();
        let out = self.term(f, &mut scope)?;
        debug_assert_eq!(typecheck(&out.0, &self.type_context()).ok(), Some(out.1.to_kernel()));
        Ok(out)
    }

    /// Surface type of a term.
    pub fn infer(&self, f: &Formula) -> Result<SurfaceType, EmbedError> {
        self.embed_term(f).map(|(_, ty)| ty)
    }

    /// `∀w. embed(f)(w)`: global validity of a formula.
    pub fn embed_valid(&self, f: &Formula) -> Result<Term, EmbedError> {
        validity_closure(&self.embed(f)?, &self.type_context())
    }

    fn term(&self, f: &Formula, sc: &mut Scope) -> Result<(Term, SurfaceType), EmbedError> {
        match f {
            Formula::Var(name) => {
                if let Some((_, kname, ty)) = sc.bound.iter().rev().find(|(n, _, _)| n == name) {
                    return Ok((Term::var(kname.clone(), ty.to_kernel()), ty.clone()));
                }
                if let Some((_, ty)) = self.free.iter().find(|(n, _)| n == name) {
                    return Ok((Term::var(name.clone(), ty.to_kernel()), ty.clone()));
                }
                Err(EmbedError::UnboundVariable(name.clone()))
            }
            Formula::Sym(name) => self.symbol(name, sc),
            Formula::Lam(b, body) => {
                let kname = sc.names.fresh(&b.name);
                sc.bound.push((b.name.clone(), kname.clone(), b.ty.clone()));
                let inner = self.term(body, sc);
                sc.bound.pop();
                let (bt, bty) = inner?;
                Ok((
                    Term::lam(kname, b.ty.to_kernel(), bt),
                    SurfaceType::arrow(b.ty.clone(), bty),
                ))
            }
            Formula::App(g, a) => {
                let (gt, gty) = self.term(g, sc)?;
                let (at, aty) = self.term(a, sc)?;
                let ty = typing::application(&gty, &aty).map_err(|m| sort_error(f, m))?;
                Ok((Term::app(gt, at), ty))
            }
            _ => {
                let w = sc.names.fresh("w");
                let body = self.at_world(f, &w, sc)?;
                Ok((Term::lam(w, SimpleType::World, body), SurfaceType::Prop))
            }
        }
    }

    fn symbol(&self, name: &str, sc: &mut Scope) -> Result<(Term, SurfaceType), EmbedError> {
        if let Some(c) = self.consts.iter().find(|c| c.name == name) {
            return Ok((Term::constant(name, c.ty.to_kernel()), c.ty.clone()));
        }
        let idx = self
            .defs
            .iter()
            .position(|d| d.name == name)
            .ok_or_else(|| EmbedError::UnknownConstant(name.to_string()))?;
        if idx >= sc.visible_defs {
            return Err(EmbedError::RecursiveDefinition(name.to_string()));
        }
        let def = &self.defs[idx];
        // Expand in a scope that sees only the parameters and earlier definitions.
        let saved_bound = std::mem::take(&mut sc.bound);
        let saved_visible = sc.visible_defs;
        sc.visible_defs = idx;
        let expanded = def
            .params
            .iter()
            .rev()
            .fold(def.body.clone(), |body, p| Formula::lam(p.clone(), body));
        let out = self.term(&expanded, sc);
        sc.bound = saved_bound;
        sc.visible_defs = saved_visible;
        out
    }

    fn world_access(w: &str, v: &str) -> Term {
        Term::apps(
            Term::constant(ACCESS, access_type()),
            [Term::var(w, SimpleType::World), Term::var(v, SimpleType::World)],
        )
    }

    /// Embeds a `wo` formula evaluated at the world variable `w`.
    fn at_world(&self, f: &Formula, w: &str, sc: &mut Scope) -> Result<Term, EmbedError> {
        Ok(match f {
            Formula::Top => Term::True,
            Formula::Bot => Term::False,
            Formula::Not(a) => Term::not(self.at_world(a, w, sc)?),
            Formula::Necessarily(a) => {
                let v = sc.names.fresh("v");
                let body = self.at_world(a, &v, sc)?;
                Term::forall(v.clone(), SimpleType::World, Term::implies(Self::world_access(w, &v), body))
            }
            Formula::Possibly(a) => {
                let v = sc.names.fresh("v");
                let body = self.at_world(a, &v, sc)?;
                Term::exists(v.clone(), SimpleType::World, Term::and(Self::world_access(w, &v), body))
            }
            Formula::Binary(c, a, b) => {
                let (a, b) = (self.at_world(a, w, sc)?, self.at_world(b, w, sc)?);
                match c {
                    crate::syntax::Connective::And => Term::and(a, b),
                    crate::syntax::Connective::Or => Term::or(a, b),
                    crate::syntax::Connective::Implies => Term::implies(a, b),
                    crate::syntax::Connective::Iff => Term::iff(a, b),
                }
            }
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                let (at, aty) = self.term(a, sc)?;
                let (bt, bty) = self.term(b, sc)?;
                typing::equality(&aty, &bty).map_err(|m| sort_error(f, m))?;
                let eq = Term::eq(at, bt);
                if matches!(f, Formula::Neq(..)) {
                    Term::not(eq)
                } else {
                    eq
                }
            }
            Formula::Quant(q, b, body) => {
                let kname = sc.names.fresh(&b.name);
                sc.bound.push((b.name.clone(), kname.clone(), b.ty.clone()));
                let inner = self.at_world(body, w, sc);
                sc.bound.pop();
                let inner = inner?;
                let ty = b.ty.to_kernel();
                let guarded = self.mode == QuantMode::Actualist && b.ty == SurfaceType::Indiv;
                let exists_here = || {
                    Term::apps(
                        Term::constant(EXISTS, exists_type()),
                        [Term::var(kname.clone(), SimpleType::Indiv), Term::var(w, SimpleType::World)],
                    )
                };
                match (q, guarded) {
                    (Quantifier::Forall, false) => Term::forall(kname.clone(), ty, inner),
                    (Quantifier::Exists, false) => Term::exists(kname.clone(), ty, inner),
                    (Quantifier::Forall, true) => {
                        Term::forall(kname.clone(), ty, Term::implies(exists_here(), inner))
                    }
                    (Quantifier::Exists, true) => Term::exists(kname.clone(), ty, Term::and(exists_here(), inner)),
                }
            }
            Formula::Var(_) | Formula::Sym(_) | Formula::App(..) | Formula::Lam(..) => {
                let (t, ty) = self.term(f, sc)?;
                typing::expect_prop("a formula position", &ty).map_err(|m| sort_error(f, m))?;
                Term::app(t, Term::var(w, SimpleType::World))
            }
        })
    }
}

/// `∀w. t(w)` for a world-lifted term `t`.
pub fn validity_closure(t: &Term, ctx: &TypeContext) -> Result<Term, EmbedError> {
    let ty = typecheck(t, ctx)?;
    if !ty.is_lifted_bool() {
        return Err(EmbedError::SortError {
            location: t.to_string(),
            message: format!("validity needs a term of type {}, found {ty}", SimpleType::lifted_bool()),
        });
    }
    Ok(match t {
        Term::Lam(w, SimpleType::World, body) => Term::forall(w.clone(), SimpleType::World, (**body).clone()),
        other => {
            let w = "w#closure";
            Term::forall(w, SimpleType::World, Term::app(other.clone(), Term::var(w, SimpleType::World)))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{eval, Assignment, Denotation};
    use crate::syntax::Binder;
    use std::collections::BTreeMap;

    fn model(worlds: usize, access: &[(usize, usize)]) -> KripkeModel {
        let mut rel = vec![vec![false; worlds]; worlds];
        for &(u, v) in access {
            rel[u][v] = true;
        }
        KripkeModel::new(worlds, 1, rel, vec![vec![true]; worlds], BTreeMap::new(), &[]).unwrap()
    }

    fn valid(e: &Embedder, f: &Formula, m: &KripkeModel, a: &Assignment) -> bool {
        let t = e.embed_valid(f).unwrap();
        eval(&t, m, a).unwrap() == Denotation::Bool(true)
    }

    #[test]
    fn top_is_valid_everywhere() {
        let e = Embedder::bare(QuantMode::Possibilist);
        let t = e.embed(&Formula::Top).unwrap();
        assert_eq!(typecheck(&t, &e.type_context()).unwrap(), SimpleType::lifted_bool());
        for m in [model(1, &[]), model(2, &[(0, 1)])] {
            assert!(valid(&e, &Formula::Top, &m, &Assignment::new()));
        }
    }

    #[test]
    fn box_bottom_needs_empty_relation() {
        let e = Embedder::bare(QuantMode::Possibilist);
        let f = Formula::nec(Formula::Bot);
        assert!(valid(&e, &f, &model(2, &[]), &Assignment::new()));
        assert!(!valid(&e, &f, &model(2, &[(1, 1)]), &Assignment::new()));
    }

    #[test]
    fn frame_classes() {
        assert!(frame_constraint(&model(2, &[(0, 0), (1, 1)]), FrameClass::KT));
        assert!(!frame_constraint(&model(2, &[(0, 0), (1, 0), (1, 1)]), FrameClass::KB));
        assert!(frame_constraint(&model(1, &[]), FrameClass::K));
        assert!(!frame_constraint(&model(1, &[]), FrameClass::S5));
        assert!(frame_constraint(&model(2, &[(0, 0), (0, 1), (1, 0), (1, 1)]), FrameClass::S5));
    }

    #[test]
    fn box_of_non_formula_is_a_sort_error() {
        let consts = vec![ConstDecl {
            name: "c".into(),
            ty: SurfaceType::Indiv,
        }];
        let e = Embedder::new(&consts, &[], QuantMode::Possibilist);
        assert!(matches!(
            e.embed(&Formula::nec(Formula::sym("c"))),
            Err(EmbedError::SortError { .. })
        ));
        assert!(matches!(e.embed(&Formula::sym("Q")), Err(EmbedError::UnknownConstant(_))));
    }

    #[test]
    fn closure_rejects_unlifted_terms() {
        let ctx = TypeContext::new();
        assert!(matches!(validity_closure(&Term::True, &ctx), Err(EmbedError::SortError { .. })));
    }

    #[test]
    fn actualist_guard_uses_existence() {
        // ex x. top is false at a world where nobody exists... which the
        // model constructor forbids, so check the guard structurally instead.
        let e = Embedder::bare(QuantMode::Actualist);
        let f = Formula::exists(Binder::new("x", SurfaceType::Indiv), Formula::Top);
        let t = e.embed(&f).unwrap();
        assert!(t.mentions_const(EXISTS));
        let p = Embedder::bare(QuantMode::Possibilist).embed(&f).unwrap();
        assert!(!p.mentions_const(EXISTS));
        // Property quantifiers are never guarded.
        let g = Formula::exists(Binder::new("ph", SurfaceType::property()), Formula::Top);
        assert!(!e.embed(&g).unwrap().mentions_const(EXISTS));
    }

    #[test]
    fn definitions_are_expanded_with_fresh_binders() {
        let consts = vec![ConstDecl {
            name: "P".into(),
            ty: SurfaceType::collection(),
        }];
        let ph = Binder::new("ph", SurfaceType::property());
        let g_body = Formula::forall(
            ph.clone(),
            Formula::implies(
                Formula::app(Formula::sym("P"), Formula::var("ph")),
                Formula::app(Formula::var("ph"), Formula::var("x")),
            ),
        );
        let defs = vec![Definition {
            name: "G".into(),
            params: vec![Binder::new("x", SurfaceType::Indiv)],
            body: g_body,
            ty: SurfaceType::property(),
        }];
        let e = Embedder::new(&consts, &defs, QuantMode::Possibilist);
        let (t, ty) = e.embed_term(&Formula::sym("G")).unwrap();
        assert_eq!(ty, SurfaceType::property());
        assert_eq!(
            typecheck(&t, &e.type_context()).unwrap(),
            SimpleType::fun(SimpleType::Indiv, SimpleType::fun(SimpleType::World, SimpleType::Bool))
        );
        let twice = Formula::and(
            Formula::app(Formula::sym("G"), Formula::var("y")),
            Formula::app(Formula::sym("G"), Formula::var("y")),
        );
        let f = Formula::forall(Binder::new("y", SurfaceType::Indiv), twice);
        let t = e.embed(&f).unwrap();
        // Every binder name in the output is distinct.
        fn binders(t: &Term, out: &mut Vec<String>) {
            match t {
                Term::Lam(n, _, b) | Term::Forall(n, _, b) | Term::Exists(n, _, b) => {
                    out.push(n.clone());
                    binders(b, out);
                }
                Term::App(a, b) | Term::And(a, b) | Term::Or(a, b) | Term::Implies(a, b) | Term::Iff(a, b) | Term::Eq(a, b) => {
                    binders(a, out);
                    binders(b, out);
                }
                Term::Not(a) => binders(a, out),
                _ => {}
            }
        }
        let mut names = Vec::new();
        binders(&t, &mut names);
        let mut dedup = names.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), names.len());
    }

    #[test]
    fn self_reference_is_rejected() {
        let defs = vec![Definition {
            name: "D".into(),
            params: vec![],
            body: Formula::not(Formula::sym("D")),
            ty: SurfaceType::Prop,
        }];
        let e = Embedder::new(&[], &defs, QuantMode::Possibilist);
        assert!(matches!(e.embed(&Formula::sym("D")), Err(EmbedError::RecursiveDefinition(_))));
    }
}
