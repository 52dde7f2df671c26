//! Reference evaluator: direct denotational semantics over full tables.
//!
//! This path is deliberately naive. Lambdas always build their complete
//! table and quantifiers enumerate the canonical denotation stream, so it
//! serves as the independent check for everything the search engine
//! reports.

use std::collections::HashMap;

use super::{enumerate_denotations, Denotation, KernelError, KripkeModel, SimpleType, Term};

/// Default per-quantifier enumeration ceiling.
pub const DEFAULT_CEILING: u64 = 1 << 24;

pub type Assignment = HashMap<String, Denotation>;

/// Evaluates a well-typed term. The only possible failure is a quantifier
/// or lambda domain that exceeds the enumeration ceiling, or a constant
/// the model does not interpret.
pub fn eval(term: &Term, model: &KripkeModel, assignment: &Assignment) -> Result<Denotation, KernelError> {
    eval_with_ceiling(term, model, assignment, DEFAULT_CEILING)
}

pub fn eval_with_ceiling(
    term: &Term,
    model: &KripkeModel,
    assignment: &Assignment,
    ceiling: u64,
) -> Result<Denotation, KernelError> {
    let mut ev = Evaluator {
        model,
        assignment,
        ceiling,
        scope: Vec::new(),
    };
    ev.eval(term)
}

struct Evaluator<'a> {
    model: &'a KripkeModel,
    assignment: &'a Assignment,
    ceiling: u64,
    scope: Vec<(&'a str, Denotation)>,
}

impl<'a> Evaluator<'a> {
    fn lookup(&self, name: &str) -> Result<Denotation, KernelError> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| *n == name)
            .map(|(_, d)| d.clone())
            .or_else(|| self.assignment.get(name).cloned())
            .ok_or_else(|| KernelError::UnboundName(name.to_string()))
    }

    fn truth(&mut self, t: &'a Term) -> Result<bool, KernelError> {
        Ok(self
            .eval(t)?
            .as_bool()
            .expect("connective operand is not boolean"))
    }

    fn domain(&self, ty: &SimpleType) -> Result<super::Denotations, KernelError> {
        enumerate_denotations(ty, self.model.worlds, self.model.individuals, self.ceiling)
    }

    fn quantify(&mut self, name: &'a str, ty: &SimpleType, body: &'a Term, universal: bool) -> Result<bool, KernelError> {
        for den in self.domain(ty)? {
            self.scope.push((name, den));
            let v = self.truth(body);
            self.scope.pop();
            if v? != universal {
                return Ok(!universal);
            }
        }
        Ok(universal)
    }

    fn eval(&mut self, term: &'a Term) -> Result<Denotation, KernelError> {
        let b = Denotation::Bool;
        Ok(match term {
            Term::True => b(true),
            Term::False => b(false),
            Term::Var(name, _) => self.lookup(name)?,
            Term::Const(name, _) => self
                .model
                .constant(name)
                .ok_or_else(|| KernelError::MissingInterpretation(name.clone()))?,
            Term::Lam(name, ty, body) => {
                let mut entries = Vec::new();
                for den in self.domain(ty)? {
                    self.scope.push((name, den));
                    let v = self.eval(body);
                    self.scope.pop();
                    entries.push(v?);
                }
                Denotation::Table(entries)
            }
            Term::App(f, a) => {
                let fv = self.eval(f)?;
                let av = self.eval(a)?;
                let dom = self.type_of(a);
                fv.apply(&dom, &av, self.model.worlds, self.model.individuals)
            }
            Term::Not(a) => b(!self.truth(a)?),
            Term::And(l, r) => b(self.truth(l)? && self.truth(r)?),
            Term::Or(l, r) => b(self.truth(l)? || self.truth(r)?),
            Term::Implies(l, r) => b(!self.truth(l)? || self.truth(r)?),
            Term::Iff(l, r) => b(self.truth(l)? == self.truth(r)?),
            Term::Eq(l, r) => b(self.eval(l)? == self.eval(r)?),
            Term::Forall(name, ty, body) => b(self.quantify(name, ty, body, true)?),
            Term::Exists(name, ty, body) => b(self.quantify(name, ty, body, false)?),
        })
    }

    /// Type of a well-typed subterm, read off annotations without checking.
    fn type_of(&self, t: &Term) -> SimpleType {
        match t {
            Term::Var(_, ty) | Term::Const(_, ty) => ty.clone(),
            Term::Lam(_, ty, body) => SimpleType::fun(ty.clone(), self.type_of(body)),
            Term::App(f, _) => match self.type_of(f) {
                SimpleType::Fun(_, cod) => *cod,
                other => panic!("application of non-function type {other}"),
            },
            _ => SimpleType::Bool,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::model::{access_type, ACCESS};
    use std::collections::BTreeMap;

    fn model(worlds: usize, individuals: usize, access: Vec<Vec<bool>>) -> KripkeModel {
        KripkeModel::new(
            worlds,
            individuals,
            access,
            vec![vec![true; individuals]; worlds],
            BTreeMap::new(),
            &[],
        )
        .unwrap()
    }

    fn ev(t: &Term, m: &KripkeModel) -> Denotation {
        eval(t, m, &Assignment::new()).unwrap()
    }

    #[test]
    fn constants_and_equality() {
        let m = model(1, 2, vec![vec![false]]);
        assert_eq!(ev(&Term::True, &m), Denotation::Bool(true));
        let x = || Term::var("x", SimpleType::Indiv);
        let refl = Term::forall("x", SimpleType::Indiv, Term::eq(x(), x()));
        assert_eq!(ev(&refl, &m), Denotation::Bool(true));
        let y = Term::var("y", SimpleType::Indiv);
        let all_equal = Term::forall("x", SimpleType::Indiv, Term::forall("y", SimpleType::Indiv, Term::eq(x(), y)));
        assert_eq!(ev(&all_equal, &m), Denotation::Bool(false));
    }

    #[test]
    fn box_false_at_dead_end() {
        // (λw. ∀v. R w v → ⊥) applied to world 0.
        let r = Term::constant(ACCESS, access_type());
        let boxed = Term::lam(
            "w",
            SimpleType::World,
            Term::forall(
                "v",
                SimpleType::World,
                Term::implies(
                    Term::apps(r, [Term::var("w", SimpleType::World), Term::var("v", SimpleType::World)]),
                    Term::False,
                ),
            ),
        );
        let mut a = Assignment::new();
        a.insert("u".into(), Denotation::World(0));
        let at_u = Term::app(boxed, Term::var("u", SimpleType::World));
        let dead = model(2, 1, vec![vec![false, false], vec![true, false]]);
        assert_eq!(eval(&at_u, &dead, &a).unwrap(), Denotation::Bool(true));
        a.insert("u".into(), Denotation::World(1));
        assert_eq!(eval(&at_u, &dead, &a).unwrap(), Denotation::Bool(false));
    }

    #[test]
    fn lambda_builds_full_table() {
        let m = model(2, 1, vec![vec![false; 2]; 2]);
        let t = Term::lam("w", SimpleType::World, Term::True);
        assert_eq!(
            ev(&t, &m),
            Denotation::Table(vec![Denotation::Bool(true), Denotation::Bool(true)])
        );
    }

    #[test]
    fn higher_order_quantifier_counts() {
        // Exactly one lifted proposition is false everywhere.
        let m = model(2, 1, vec![vec![false; 2]; 2]);
        let lb = SimpleType::lifted_bool();
        let s = || Term::var("s", SimpleType::lifted_bool());
        let w = || Term::var("w", SimpleType::World);
        let never = |t: Term| Term::forall("w", SimpleType::World, Term::not(Term::app(t, w())));
        let exists_never = Term::exists("s", lb.clone(), never(s()));
        assert_eq!(ev(&exists_never, &m), Denotation::Bool(true));
        let two_distinct_never = Term::exists(
            "s",
            lb.clone(),
            Term::exists(
                "t",
                lb.clone(),
                Term::and(
                    Term::not(Term::eq(s(), Term::var("t", lb.clone()))),
                    Term::and(never(s()), never(Term::var("t", lb))),
                ),
            ),
        );
        assert_eq!(ev(&two_distinct_never, &m), Denotation::Bool(false));
    }

    #[test]
    fn ceiling_overflow_surfaces() {
        let m = model(2, 2, vec![vec![false; 2]; 2]);
        let coll = SimpleType::fun(SimpleType::property(), SimpleType::lifted_bool());
        let t = Term::forall("z", coll, Term::True);
        assert!(matches!(eval(&t, &m, &Assignment::new()), Err(KernelError::BoundOverflow { .. })));
    }
}
