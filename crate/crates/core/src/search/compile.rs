//! Compiled evaluator used by the search.
//!
//! Kernel terms are compiled for fixed model sizes into a tree whose values
//! are canonical indices (`u64`) instead of tables. Evaluation is
//! three-valued: `None` means the value depends on a constant slot the
//! search has not decided yet. The connectives follow Kleene's strong
//! tables, so a definite result under a partial interpretation holds for
//! every completion of it.

use crate::kernel::model::{ACCESS, EXISTS};
use crate::kernel::{KernelError, SimpleType, Term};

pub(crate) type Val = Option<u64>;

#[derive(Debug, Clone)]
pub(crate) enum Node {
    True,
    False,
    Var(usize),
    /// Whole table of a user constant.
    Const(usize),
    /// A user constant applied to its first argument.
    ConstAt(usize, Box<Node>),
    Access(Box<Node>, Box<Node>),
    Exists(Box<Node>, Box<Node>),
    AccessTable,
    ExistsTable,
    Lam {
        slot: usize,
        dom: u64,
        cod: u64,
        body: Box<Node>,
    },
    /// `(λslot. body) arg`, evaluated by binding instead of tabulating.
    Beta {
        slot: usize,
        arg: Box<Node>,
        body: Box<Node>,
    },
    App {
        f: Box<Node>,
        arg: Box<Node>,
        cod: u64,
        /// `powers[i] = cod^(dom-1-i)`
        powers: Vec<u64>,
    },
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Eq(Box<Node>, Box<Node>),
    Forall {
        slot: usize,
        size: u64,
        body: Box<Node>,
    },
    Exists_ {
        slot: usize,
        size: u64,
        body: Box<Node>,
    },
}

/// How a user constant's interpretation is split into search slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ConstLayout {
    pub name: String,
    pub ty: SimpleType,
    /// Number of slots: the domain size for functions, 1 otherwise.
    pub slots: usize,
    /// Size of the codomain (or of the type itself for non-functions).
    pub base: u64,
    /// Values a slot may take, ascending.
    pub values: Vec<u64>,
    pub rigid: bool,
}

impl ConstLayout {
    pub fn new(
        name: &str,
        ty: &SimpleType,
        rigid: bool,
        worlds: usize,
        individuals: usize,
        ceiling: u64,
    ) -> Result<Self, KernelError> {
        let (w, d) = (worlds as u64, individuals as u64);
        let (slots, base) = match ty {
            SimpleType::Fun(a, b) => (
                a.bounded_space_size(w, d, ceiling)? as usize,
                b.bounded_space_size(w, d, ceiling)?,
            ),
            other => (1, other.bounded_space_size(w, d, ceiling)?),
        };
        let values = if rigid {
            // A rigid predicate maps each argument to a world-constant truth value.
            vec![0, base - 1]
        } else {
            (0..base).collect()
        };
        Ok(Self {
            name: name.to_string(),
            ty: ty.clone(),
            slots,
            base,
            values,
            rigid,
        })
    }

    pub fn is_function(&self) -> bool {
        matches!(self.ty, SimpleType::Fun(..))
    }
}

/// The part of a model the compiled evaluator reads.
pub(crate) struct View<'a> {
    pub worlds: usize,
    pub individuals: usize,
    /// Row-major `worlds x worlds`.
    pub access: &'a [bool],
    /// Row-major `worlds x individuals`.
    pub exists: &'a [bool],
    /// Per constant, per slot.
    pub slots: &'a [Vec<Option<u64>>],
    pub layouts: &'a [ConstLayout],
}

pub(crate) struct Compiler<'a> {
    worlds: u64,
    individuals: u64,
    ceiling: u64,
    layouts: &'a [ConstLayout],
    scope: Vec<(String, usize, SimpleType)>,
    pub slots: usize,
}

impl<'a> Compiler<'a> {
    pub fn new(worlds: usize, individuals: usize, ceiling: u64, layouts: &'a [ConstLayout]) -> Self {
        Self {
            worlds: worlds as u64,
            individuals: individuals as u64,
            ceiling,
            layouts,
            scope: Vec::new(),
            slots: 0,
        }
    }

    fn size(&self, ty: &SimpleType) -> Result<u64, KernelError> {
        ty.bounded_space_size(self.worlds, self.individuals, self.ceiling)
    }

    /// Sizes of a function type that values must be able to encode.
    fn encodable(&self, ty: &SimpleType) -> Result<(), KernelError> {
        match ty.space_size(self.worlds, self.individuals) {
            Some(_) => Ok(()),
            None => Err(KernelError::BoundOverflow {
                ty: ty.clone(),
                worlds: self.worlds,
                individuals: self.individuals,
                ceiling: u64::MAX,
            }),
        }
    }

    fn bind(&mut self, name: &str, ty: &SimpleType) -> usize {
        let slot = self.slots;
        self.slots += 1;
        self.scope.push((name.to_string(), slot, ty.clone()));
        slot
    }

    pub fn compile(&mut self, t: &Term) -> Result<(Node, SimpleType), KernelError> {
        let b = |n: Node| Box::new(n);
        Ok(match t {
            Term::True => (Node::True, SimpleType::Bool),
            Term::False => (Node::False, SimpleType::Bool),
            Term::Var(name, _) => {
                let (_, slot, ty) = self
                    .scope
                    .iter()
                    .rev()
                    .find(|(n, _, _)| n == name)
                    .ok_or_else(|| KernelError::UnboundName(name.clone()))?;
                (Node::Var(*slot), ty.clone())
            }
            Term::Const(name, ty) => {
                self.encodable(ty)?;
                match name.as_str() {
                    ACCESS => (Node::AccessTable, ty.clone()),
                    EXISTS => (Node::ExistsTable, ty.clone()),
                    _ => (Node::Const(self.const_index(name)?), ty.clone()),
                }
            }
            Term::Lam(name, ty, body) => {
                let dom = self.size(ty)?;
                let slot = self.bind(name, ty);
                let inner = self.compile(body);
                self.scope.pop();
                let (body, body_ty) = inner?;
                let fun_ty = SimpleType::fun(ty.clone(), body_ty.clone());
                self.encodable(&fun_ty)?;
                let cod = self.size(&body_ty).or_else(|_| {
                    body_ty
                        .space_size(self.worlds, self.individuals)
                        .ok_or_else(|| KernelError::UnboundName(String::new()))
                })?;
                (Node::Lam { slot, dom, cod, body: b(body) }, fun_ty)
            }
            Term::App(..) => {
                let mut args = Vec::new();
                let mut head = t;
                while let Term::App(f, a) = head {
                    args.push(&**a);
                    head = f;
                }
                args.reverse();
                let compiled = args
                    .iter()
                    .map(|a| self.compile(a))
                    .collect::<Result<Vec<_>, _>>()?;
                self.spine(head, compiled)?
            }
            Term::Not(a) => (Node::Not(b(self.compile(a)?.0)), SimpleType::Bool),
            Term::And(l, r) => (Node::And(b(self.compile(l)?.0), b(self.compile(r)?.0)), SimpleType::Bool),
            Term::Or(l, r) => (Node::Or(b(self.compile(l)?.0), b(self.compile(r)?.0)), SimpleType::Bool),
            Term::Implies(l, r) => (
                Node::Implies(b(self.compile(l)?.0), b(self.compile(r)?.0)),
                SimpleType::Bool,
            ),
            Term::Iff(l, r) => (Node::Iff(b(self.compile(l)?.0), b(self.compile(r)?.0)), SimpleType::Bool),
            Term::Eq(l, r) => (Node::Eq(b(self.compile(l)?.0), b(self.compile(r)?.0)), SimpleType::Bool),
            Term::Forall(name, ty, body) | Term::Exists(name, ty, body) => {
                let size = self.size(ty)?;
                let slot = self.bind(name, ty);
                let inner = self.compile(body);
                self.scope.pop();
                let body = b(inner?.0);
                let node = if matches!(t, Term::Forall(..)) {
                    Node::Forall { slot, size, body }
                } else {
                    Node::Exists_ { slot, size, body }
                };
                (node, SimpleType::Bool)
            }
        })
    }

    fn const_index(&self, name: &str) -> Result<usize, KernelError> {
        self.layouts
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| KernelError::MissingInterpretation(name.to_string()))
    }

    /// Compiles `head args...` with the arguments already compiled in the
    /// enclosing scope.
    fn spine(&mut self, head: &Term, mut args: Vec<(Node, SimpleType)>) -> Result<(Node, SimpleType), KernelError> {
        if args.is_empty() {
            return self.compile(head);
        }
        match head {
            Term::Lam(name, ty, body) => {
                let (arg, _) = args.remove(0);
                let slot = self.bind(name, ty);
                let inner = self.spine(body, args);
                self.scope.pop();
                let (body, body_ty) = inner?;
                Ok((
                    Node::Beta {
                        slot,
                        arg: Box::new(arg),
                        body: Box::new(body),
                    },
                    body_ty,
                ))
            }
            Term::Const(name, _) if (name == ACCESS || name == EXISTS) && args.len() >= 2 => {
                let mut it = args.into_iter();
                let (a, _) = it.next().unwrap();
                let (c, _) = it.next().unwrap();
                let node = if name == ACCESS {
                    Node::Access(Box::new(a), Box::new(c))
                } else {
                    Node::Exists(Box::new(a), Box::new(c))
                };
                self.apply_rest((node, SimpleType::Bool), it.collect())
            }
            Term::Const(name, ty) if name != ACCESS && name != EXISTS => {
                let cid = self.const_index(name)?;
                let (dom_arg, _) = args.remove(0);
                let cod = match ty {
                    SimpleType::Fun(_, cod) => (**cod).clone(),
                    other => {
                        return Err(KernelError::NotAFunction {
                            location: name.clone(),
                            found: other.clone(),
                        })
                    }
                };
                self.apply_rest((Node::ConstAt(cid, Box::new(dom_arg)), cod), args)
            }
            _ => {
                let f = self.compile(head)?;
                self.apply_rest(f, args)
            }
        }
    }

    fn apply_rest(
        &mut self,
        mut f: (Node, SimpleType),
        args: Vec<(Node, SimpleType)>,
    ) -> Result<(Node, SimpleType), KernelError> {
        for (arg, _) in args {
            let (dom_ty, cod_ty) = match &f.1 {
                SimpleType::Fun(a, b) => ((**a).clone(), (**b).clone()),
                other => {
                    return Err(KernelError::NotAFunction {
                        location: String::from("application"),
                        found: other.clone(),
                    })
                }
            };
            let dom = self.size(&dom_ty)?;
            let cod = cod_ty
                .space_size(self.worlds, self.individuals)
                .ok_or_else(|| KernelError::BoundOverflow {
                    ty: cod_ty.clone(),
                    worlds: self.worlds,
                    individuals: self.individuals,
                    ceiling: u64::MAX,
                })?;
            let powers = (0..dom).map(|i| cod.pow((dom - 1 - i) as u32)).collect();
            f = (
                Node::App {
                    f: Box::new(f.0),
                    arg: Box::new(arg),
                    cod,
                    powers,
                },
                cod_ty,
            );
        }
        Ok(f)
    }
}

fn bool_val(b: bool) -> Val {
    Some(u64::from(b))
}

/// Canonical index of a whole constant table, if every slot is decided.
pub(crate) fn const_code(layout: &ConstLayout, slots: &[Option<u64>]) -> Val {
    if !layout.is_function() {
        return slots[0];
    }
    let mut code = 0u64;
    for s in slots {
        code = code * layout.base + (*s)?;
    }
    Some(code)
}

pub(crate) fn eval(node: &Node, env: &mut [Val], m: &View) -> Val {
    match node {
        Node::True => Some(1),
        Node::False => Some(0),
        Node::Var(slot) => env[*slot],
        Node::Const(cid) => const_code(&m.layouts[*cid], &m.slots[*cid]),
        Node::ConstAt(cid, arg) => {
            let a = eval(arg, env, m)?;
            m.slots[*cid][a as usize]
        }
        Node::Access(u, v) => {
            let u = eval(u, env, m)? as usize;
            let v = eval(v, env, m)? as usize;
            bool_val(m.access[u * m.worlds + v])
        }
        Node::Exists(x, w) => {
            let x = eval(x, env, m)? as usize;
            let w = eval(w, env, m)? as usize;
            bool_val(m.exists[w * m.individuals + x])
        }
        Node::AccessTable => {
            let n = m.worlds;
            Some(m.access.iter().take(n * n).fold(0u64, |acc, &b| (acc << 1) | u64::from(b)))
        }
        Node::ExistsTable => {
            let (n, d) = (m.worlds, m.individuals);
            let mut code = 0u64;
            for x in 0..d {
                for w in 0..n {
                    code = (code << 1) | u64::from(m.exists[w * d + x]);
                }
            }
            Some(code)
        }
        Node::Lam { slot, dom, cod, body } => {
            let mut code = 0u64;
            for i in 0..*dom {
                env[*slot] = Some(i);
                code = code * cod + eval(body, env, m)?;
            }
            Some(code)
        }
        Node::Beta { slot, arg, body } => {
            env[*slot] = eval(arg, env, m);
            eval(body, env, m)
        }
        Node::App { f, arg, cod, powers } => {
            let fv = eval(f, env, m)?;
            let a = eval(arg, env, m)? as usize;
            Some((fv / powers[a]) % cod)
        }
        Node::Not(a) => eval(a, env, m).map(|v| 1 - v),
        Node::And(l, r) => {
            let lv = eval(l, env, m);
            if lv == Some(0) {
                return Some(0);
            }
            match (lv, eval(r, env, m)) {
                (_, Some(0)) => Some(0),
                (Some(1), Some(1)) => Some(1),
                _ => None,
            }
        }
        Node::Or(l, r) => {
            let lv = eval(l, env, m);
            if lv == Some(1) {
                return Some(1);
            }
            match (lv, eval(r, env, m)) {
                (_, Some(1)) => Some(1),
                (Some(0), Some(0)) => Some(0),
                _ => None,
            }
        }
        Node::Implies(l, r) => {
            let lv = eval(l, env, m);
            if lv == Some(0) {
                return Some(1);
            }
            match (lv, eval(r, env, m)) {
                (_, Some(1)) => Some(1),
                (Some(1), Some(0)) => Some(0),
                _ => None,
            }
        }
        Node::Iff(l, r) => {
            let lv = eval(l, env, m)?;
            let rv = eval(r, env, m)?;
            bool_val(lv == rv)
        }
        Node::Eq(l, r) => {
            let lv = eval(l, env, m)?;
            let rv = eval(r, env, m)?;
            bool_val(lv == rv)
        }
        Node::Forall { slot, size, body } => {
            let mut unknown = false;
            for i in 0..*size {
                env[*slot] = Some(i);
                match eval(body, env, m) {
                    Some(0) => return Some(0),
                    None => unknown = true,
                    _ => {}
                }
            }
            if unknown {
                None
            } else {
                Some(1)
            }
        }
        Node::Exists_ { slot, size, body } => {
            let mut unknown = false;
            for i in 0..*size {
                env[*slot] = Some(i);
                match eval(body, env, m) {
                    Some(1) => return Some(1),
                    None => unknown = true,
                    _ => {}
                }
            }
            if unknown {
                None
            } else {
                Some(0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::model::access_type;

    fn run(t: &Term, worlds: usize, access: &[bool]) -> Val {
        let mut c = Compiler::new(worlds, 1, 1 << 24, &[]);
        let (node, ty) = c.compile(t).unwrap();
        assert_eq!(ty, SimpleType::Bool);
        let mut env = vec![None; c.slots];
        let exists = vec![true; worlds];
        let view = View {
            worlds,
            individuals: 1,
            access,
            exists: &exists,
            slots: &[],
            layouts: &[],
        };
        eval(&node, &mut env, &view)
    }

    #[test]
    fn access_table_matches_applications() {
        // ∀u v. R u v = (R u) v, where the right side goes through the table.
        let w = || SimpleType::World;
        let r = || Term::constant(ACCESS, access_type());
        let direct = Term::apps(r(), [Term::var("u", w()), Term::var("v", w())]);
        let via_table = Term::app(
            Term::app(
                Term::lam("f", access_type(), Term::var("f", access_type())),
                r(),
            ),
            Term::var("u", w()),
        );
        let via_table = Term::app(via_table, Term::var("v", w()));
        let t = Term::forall("u", w(), Term::forall("v", w(), Term::iff(direct, via_table)));
        for access in [[true, false, true, true], [false, true, false, false]] {
            assert_eq!(run(&t, 2, &access), Some(1));
        }
    }

    #[test]
    fn kleene_connectives_with_unknowns() {
        let layout = ConstLayout::new("c", &SimpleType::Bool, false, 1, 1, 1 << 24).unwrap();
        let layouts = vec![layout];
        let mut c = Compiler::new(1, 1, 1 << 24, &layouts);
        let cst = || Term::constant("c", SimpleType::Bool);
        let cases = [
            (Term::and(Term::False, cst()), Some(0)),
            (Term::and(Term::True, cst()), None),
            (Term::or(cst(), Term::True), Some(1)),
            (Term::implies(cst(), Term::True), Some(1)),
            (Term::implies(Term::False, cst()), Some(1)),
            (Term::iff(cst(), Term::True), None),
            (Term::forall("b", SimpleType::Bool, Term::and(Term::var("b", SimpleType::Bool), cst())), Some(0)),
        ];
        let slots = vec![vec![None]];
        let view = View {
            worlds: 1,
            individuals: 1,
            access: &[false],
            exists: &[true],
            slots: &slots,
            layouts: &layouts,
        };
        for (t, expected) in cases {
            let (node, _) = c.compile(&t).unwrap();
            let mut env = vec![None; c.slots];
            assert_eq!(eval(&node, &mut env, &view), expected, "{t}");
        }
    }

    #[test]
    fn rigid_layout_values() {
        let ty = SimpleType::fun(SimpleType::property(), SimpleType::lifted_bool());
        let l = ConstLayout::new("P", &ty, true, 2, 2, 1 << 24).unwrap();
        assert_eq!(l.slots, 16);
        assert_eq!(l.values, vec![0, 3]);
        let l = ConstLayout::new("P", &ty, false, 2, 1, 1 << 24).unwrap();
        assert_eq!(l.values, vec![0, 1, 2, 3]);
    }
}
