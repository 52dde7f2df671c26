use std::fmt;

use crate::kernel::SimpleType;

/// Types of the modal surface language. Truth values are always
/// world-lifted (`wo`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SurfaceType {
    Indiv,
    Prop,
    Arrow(Box<SurfaceType>, Box<SurfaceType>),
}

impl SurfaceType {
    pub fn arrow(a: SurfaceType, b: SurfaceType) -> Self {
        SurfaceType::Arrow(Box::new(a), Box::new(b))
    }

    /// `i>wo`
    pub fn property() -> Self {
        Self::arrow(SurfaceType::Indiv, SurfaceType::Prop)
    }

    /// `(i>wo)>wo`
    pub fn collection() -> Self {
        Self::arrow(Self::property(), SurfaceType::Prop)
    }

    pub fn to_kernel(&self) -> SimpleType {
        match self {
            SurfaceType::Indiv => SimpleType::Indiv,
            SurfaceType::Prop => SimpleType::lifted_bool(),
            SurfaceType::Arrow(a, b) => SimpleType::fun(a.to_kernel(), b.to_kernel()),
        }
    }

    /// Predicates (`τ>wo`) are interpreted rigidly by the model finder.
    pub fn is_predicate(&self) -> bool {
        matches!(self, SurfaceType::Arrow(_, b) if **b == SurfaceType::Prop)
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceType::Indiv => write!(f, "i"),
            SurfaceType::Prop => write!(f, "wo"),
            SurfaceType::Arrow(a, b) => match **a {
                SurfaceType::Arrow(..) => write!(f, "({a})>{b}"),
                _ => write!(f, "{a}>{b}"),
            },
        }
    }
}

/// Type a bound variable gets when written without an annotation, keyed on
/// its name with trailing digits, underscores and primes removed.
pub fn default_type(name: &str) -> Option<SurfaceType> {
    let base = name.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_' || c == '\'');
    match base {
        "x" | "y" | "z" | "u" | "v" | "e" => Some(SurfaceType::Indiv),
        "ph" | "phi" | "ps" | "psi" | "X" | "Y" => Some(SurfaceType::property()),
        "Z" => Some(SurfaceType::collection()),
        "s" | "t" => Some(SurfaceType::Prop),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binder {
    pub name: String,
    pub ty: SurfaceType,
}

impl Binder {
    pub fn new(name: impl Into<String>, ty: SurfaceType) -> Self {
        Self {
            name: name.into(),
            ty,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
}

impl Connective {
    pub fn symbol(self) -> &'static str {
        match self {
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Implies => "->",
            Connective::Iff => "<->",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// Higher-order modal formulas and terms as written in theory files.
///
/// `Var` is a bound variable or definition parameter; `Sym` is a declared
/// constant or an earlier definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Top,
    Bot,
    Var(String),
    Sym(String),
    Not(Box<Formula>),
    Necessarily(Box<Formula>),
    Possibly(Box<Formula>),
    Binary(Connective, Box<Formula>, Box<Formula>),
    Eq(Box<Formula>, Box<Formula>),
    Neq(Box<Formula>, Box<Formula>),
    Quant(Quantifier, Binder, Box<Formula>),
    Lam(Binder, Box<Formula>),
    App(Box<Formula>, Box<Formula>),
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn var(n: impl Into<String>) -> Self {
        Formula::Var(n.into())
    }
    pub fn sym(n: impl Into<String>) -> Self {
        Formula::Sym(n.into())
    }
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }
    pub fn nec(a: Formula) -> Self {
        Formula::Necessarily(Box::new(a))
    }
    pub fn poss(a: Formula) -> Self {
        Formula::Possibly(Box::new(a))
    }
    pub fn binary(c: Connective, a: Formula, b: Formula) -> Self {
        Formula::Binary(c, Box::new(a), Box::new(b))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        Self::binary(Connective::And, a, b)
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Self::binary(Connective::Or, a, b)
    }
    pub fn implies(a: Formula, b: Formula) -> Self {
        Self::binary(Connective::Implies, a, b)
    }
    pub fn iff(a: Formula, b: Formula) -> Self {
        Self::binary(Connective::Iff, a, b)
    }
    pub fn eq(a: Formula, b: Formula) -> Self {
        Formula::Eq(Box::new(a), Box::new(b))
    }
    pub fn neq(a: Formula, b: Formula) -> Self {
        Formula::Neq(Box::new(a), Box::new(b))
    }
    pub fn forall(b: Binder, body: Formula) -> Self {
        Formula::Quant(Quantifier::Forall, b, Box::new(body))
    }
    pub fn exists(b: Binder, body: Formula) -> Self {
        Formula::Quant(Quantifier::Exists, b, Box::new(body))
    }
    pub fn lam(b: Binder, body: Formula) -> Self {
        Formula::Lam(b, Box::new(body))
    }
    pub fn app(f: Formula, a: Formula) -> Self {
        Formula::App(Box::new(f), Box::new(a))
    }
    pub fn apps(f: Formula, args: impl IntoIterator<Item = Formula>) -> Self {
        args.into_iter().fold(f, Formula::app)
    }

    /// Names of all `Sym` nodes, in order of first occurrence.
    pub fn symbols(&self) -> Vec<&str> {
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a str>) {
            match f {
                Formula::Sym(n) => {
                    if !out.contains(&n.as_str()) {
                        out.push(n)
                    }
                }
                Formula::Top | Formula::Bot | Formula::Var(_) => {}
                Formula::Not(a) | Formula::Necessarily(a) | Formula::Possibly(a) => go(a, out),
                Formula::Quant(_, _, a) | Formula::Lam(_, a) => go(a, out),
                Formula::Binary(_, a, b) | Formula::Eq(a, b) | Formula::Neq(a, b) | Formula::App(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

/// Typing rules shared by the parser and the embedder.
pub mod typing {
    use super::SurfaceType;

    pub fn expect_prop(what: &str, found: &SurfaceType) -> Result<(), String> {
        if *found == SurfaceType::Prop {
            Ok(())
        } else {
            Err(format!("{what} expects a formula of type wo, found {found}"))
        }
    }

    pub fn equality(lhs: &SurfaceType, rhs: &SurfaceType) -> Result<SurfaceType, String> {
        if lhs == rhs {
            Ok(SurfaceType::Prop)
        } else {
            Err(format!("equality between {lhs} and {rhs}"))
        }
    }

    pub fn application(f: &SurfaceType, arg: &SurfaceType) -> Result<SurfaceType, String> {
        match f {
            SurfaceType::Arrow(dom, cod) if **dom == *arg => Ok((**cod).clone()),
            SurfaceType::Arrow(dom, _) => Err(format!("argument of type {arg} where {dom} was expected")),
            other => Err(format!("a term of type {other} cannot be applied")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_by_name() {
        assert_eq!(default_type("x"), Some(SurfaceType::Indiv));
        assert_eq!(default_type("y2"), Some(SurfaceType::Indiv));
        assert_eq!(default_type("ph'"), Some(SurfaceType::property()));
        assert_eq!(default_type("psi"), Some(SurfaceType::property()));
        assert_eq!(default_type("Z"), Some(SurfaceType::collection()));
        assert_eq!(default_type("s"), Some(SurfaceType::Prop));
        assert_eq!(default_type("foo"), None);
    }

    #[test]
    fn type_display_and_kernel() {
        assert_eq!(SurfaceType::collection().to_string(), "(i>wo)>wo");
        assert_eq!(SurfaceType::property().to_kernel(), SimpleType::property());
        assert!(SurfaceType::collection().is_predicate());
        assert!(!SurfaceType::Indiv.is_predicate());
    }

    #[test]
    fn typing_rules() {
        let p = SurfaceType::property();
        assert_eq!(typing::application(&p, &SurfaceType::Indiv), Ok(SurfaceType::Prop));
        assert!(typing::application(&p, &SurfaceType::Prop).is_err());
        assert!(typing::application(&SurfaceType::Indiv, &SurfaceType::Indiv).is_err());
        assert!(typing::equality(&SurfaceType::Indiv, &SurfaceType::Prop).is_err());
        assert!(typing::expect_prop("box", &SurfaceType::Indiv).is_err());
    }
}
