use std::collections::HashMap;
use std::fmt;

use super::{KernelError, SimpleType};

/// Terms of the classical higher-order core.
///
/// Binders carry their variable name and type; `Var` and `Const` carry the
/// type they are used at so that typechecking can compare against the
/// declaration context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String, SimpleType),
    Const(String, SimpleType),
    Lam(String, SimpleType, Box<Term>),
    App(Box<Term>, Box<Term>),
    Not(Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Implies(Box<Term>, Box<Term>),
    Iff(Box<Term>, Box<Term>),
    Eq(Box<Term>, Box<Term>),
    Forall(String, SimpleType, Box<Term>),
    Exists(String, SimpleType, Box<Term>),
    True,
    False,
}

impl Term {
    pub fn var(name: impl Into<String>, ty: SimpleType) -> Self {
        Term::Var(name.into(), ty)
    }

    pub fn constant(name: impl Into<String>, ty: SimpleType) -> Self {
        Term::Const(name.into(), ty)
    }

    pub fn lam(name: impl Into<String>, ty: SimpleType, body: Term) -> Self {
        Term::Lam(name.into(), ty, Box::new(body))
    }

    pub fn app(f: Term, arg: Term) -> Self {
        Term::App(Box::new(f), Box::new(arg))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Self {
        args.into_iter().fold(f, Term::app)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(t: Term) -> Self {
        Term::Not(Box::new(t))
    }

    pub fn and(a: Term, b: Term) -> Self {
        Term::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Term, b: Term) -> Self {
        Term::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Term, b: Term) -> Self {
        Term::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Term, b: Term) -> Self {
        Term::Iff(Box::new(a), Box::new(b))
    }

    pub fn eq(a: Term, b: Term) -> Self {
        Term::Eq(Box::new(a), Box::new(b))
    }

    pub fn forall(name: impl Into<String>, ty: SimpleType, body: Term) -> Self {
        Term::Forall(name.into(), ty, Box::new(body))
    }

    pub fn exists(name: impl Into<String>, ty: SimpleType, body: Term) -> Self {
        Term::Exists(name.into(), ty, Box::new(body))
    }

    /// Names of free variables and constants, each with its annotated type.
    pub fn free_names(&self) -> Vec<(String, SimpleType)> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut Vec<(String, SimpleType)>) {
            match t {
                Term::Var(n, ty) | Term::Const(n, ty) => {
                    if !bound.contains(n) && !out.iter().any(|(m, _)| m == n) {
                        out.push((n.clone(), ty.clone()));
                    }
                }
                Term::Lam(n, _, b) | Term::Forall(n, _, b) | Term::Exists(n, _, b) => {
                    bound.push(n.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Term::App(a, b)
                | Term::And(a, b)
                | Term::Or(a, b)
                | Term::Implies(a, b)
                | Term::Iff(a, b)
                | Term::Eq(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Term::Not(a) => go(a, bound, out),
                Term::True | Term::False => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn mentions_const(&self, name: &str) -> bool {
        match self {
            Term::Const(n, _) => n == name,
            Term::Var(..) | Term::True | Term::False => false,
            Term::Lam(_, _, b) | Term::Forall(_, _, b) | Term::Exists(_, _, b) | Term::Not(b) => {
                b.mentions_const(name)
            }
            Term::App(a, b)
            | Term::And(a, b)
            | Term::Or(a, b)
            | Term::Implies(a, b)
            | Term::Iff(a, b)
            | Term::Eq(a, b) => a.mentions_const(name) || b.mentions_const(name),
        }
    }
}

/// Hands out binder names that never repeat within one supply.
#[derive(Debug, Default)]
pub struct NameSupply {
    next: usize,
}

impl NameSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let n = self.next;
        self.next += 1;
        format!("{base}#{n}")
    }
}

/// Declaration context for [`typecheck`].
pub type TypeContext = HashMap<String, SimpleType>;

/// Returns the type of `term`, checking every application and connective.
pub fn typecheck(term: &Term, context: &TypeContext) -> Result<SimpleType, KernelError> {
    let mut scope: Vec<(&str, &SimpleType)> = Vec::new();
    check(term, context, &mut scope)
}

fn expect(t: &Term, expected: &SimpleType, found: SimpleType) -> Result<(), KernelError> {
    if *expected == found {
        Ok(())
    } else {
        Err(KernelError::TypeMismatch {
            location: t.to_string(),
            expected: expected.clone(),
            found,
        })
    }
}

fn check<'a>(
    term: &'a Term,
    context: &TypeContext,
    scope: &mut Vec<(&'a str, &'a SimpleType)>,
) -> Result<SimpleType, KernelError> {
    match term {
        Term::True | Term::False => Ok(SimpleType::Bool),
        Term::Var(name, ty) | Term::Const(name, ty) => {
            let declared = scope
                .iter()
                .rev()
                .find(|(n, _)| *n == name.as_str())
                .map(|(_, t)| (*t).clone())
                .or_else(|| context.get(name).cloned())
                .ok_or_else(|| KernelError::UnboundName(name.clone()))?;
            expect(term, &declared, ty.clone())?;
            Ok(declared)
        }
        Term::Lam(name, ty, body) => {
            scope.push((name, ty));
            let body_ty = check(body, context, scope);
            scope.pop();
            Ok(SimpleType::fun(ty.clone(), body_ty?))
        }
        Term::Forall(name, ty, body) | Term::Exists(name, ty, body) => {
            scope.push((name, ty));
            let body_ty = check(body, context, scope);
            scope.pop();
            expect(body, &SimpleType::Bool, body_ty?)?;
            Ok(SimpleType::Bool)
        }
        Term::App(f, a) => {
            let f_ty = check(f, context, scope)?;
            let a_ty = check(a, context, scope)?;
            match f_ty {
                SimpleType::Fun(dom, cod) => {
                    expect(a, &dom, a_ty)?;
                    Ok(*cod)
                }
                other => Err(KernelError::NotAFunction {
                    location: f.to_string(),
                    found: other,
                }),
            }
        }
        Term::Not(a) => {
            let ty = check(a, context, scope)?;
            expect(a, &SimpleType::Bool, ty)?;
            Ok(SimpleType::Bool)
        }
        Term::And(a, b) | Term::Or(a, b) | Term::Implies(a, b) | Term::Iff(a, b) => {
            for side in [a, b] {
                let ty = check(side, context, scope)?;
                expect(side, &SimpleType::Bool, ty)?;
            }
            Ok(SimpleType::Bool)
        }
        Term::Eq(a, b) => {
            let a_ty = check(a, context, scope)?;
            let b_ty = check(b, context, scope)?;
            expect(b, &a_ty, b_ty)?;
            Ok(SimpleType::Bool)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n, _) | Term::Const(n, _) => write!(f, "{n}"),
            Term::Lam(n, ty, b) => write!(f, "(λ{n}:{ty}. {b})"),
            Term::App(a, b) => write!(f, "({a} {b})"),
            Term::Not(a) => write!(f, "¬{a}"),
            Term::And(a, b) => write!(f, "({a} ∧ {b})"),
            Term::Or(a, b) => write!(f, "({a} ∨ {b})"),
            Term::Implies(a, b) => write!(f, "({a} → {b})"),
            Term::Iff(a, b) => write!(f, "({a} ↔ {b})"),
            Term::Eq(a, b) => write!(f, "({a} = {b})"),
            Term::Forall(n, ty, b) => write!(f, "(∀{n}:{ty}. {b})"),
            Term::Exists(n, ty, b) => write!(f, "(∃{n}:{ty}. {b})"),
            Term::True => write!(f, "⊤"),
            Term::False => write!(f, "⊥"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indiv_identity() -> Term {
        Term::lam(
            "x",
            SimpleType::Indiv,
            Term::eq(
                Term::var("x", SimpleType::Indiv),
                Term::var("x", SimpleType::Indiv),
            ),
        )
    }

    #[test]
    fn identity_predicate_types() {
        let ty = typecheck(&indiv_identity(), &TypeContext::new()).unwrap();
        assert_eq!(ty, SimpleType::fun(SimpleType::Indiv, SimpleType::Bool));
    }

    #[test]
    fn domain_mismatch_is_rejected() {
        let mut ctx = TypeContext::new();
        ctx.insert("c".into(), SimpleType::World);
        let t = Term::app(indiv_identity(), Term::constant("c", SimpleType::World));
        match typecheck(&t, &ctx) {
            Err(KernelError::TypeMismatch {
                expected, found, ..
            }) => {
                assert_eq!(expected, SimpleType::Indiv);
                assert_eq!(found, SimpleType::World);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbound_names() {
        let t = Term::constant("P", SimpleType::Bool);
        assert!(matches!(
            typecheck(&t, &TypeContext::new()),
            Err(KernelError::UnboundName(n)) if n == "P"
        ));
    }

    #[test]
    fn annotation_must_match_context() {
        let mut ctx = TypeContext::new();
        ctx.insert("c".into(), SimpleType::Indiv);
        let t = Term::constant("c", SimpleType::World);
        assert!(matches!(
            typecheck(&t, &ctx),
            Err(KernelError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn applying_a_non_function() {
        let t = Term::app(Term::True, Term::False);
        assert!(matches!(
            typecheck(&t, &TypeContext::new()),
            Err(KernelError::NotAFunction { .. })
        ));
    }

    #[test]
    fn fresh_names_are_distinct() {
        let mut s = NameSupply::new();
        let a = s.fresh("w");
        let b = s.fresh("w");
        assert_ne!(a, b);
    }

    #[test]
    fn free_names_skip_bound() {
        let t = Term::forall(
            "x",
            SimpleType::Indiv,
            Term::app(
                Term::constant("Q", SimpleType::fun(SimpleType::Indiv, SimpleType::Bool)),
                Term::var("x", SimpleType::Indiv),
            ),
        );
        let names: Vec<_> = t.free_names().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, vec!["Q".to_string()]);
        assert!(t.mentions_const("Q"));
        assert!(!t.mentions_const("x"));
    }
}
