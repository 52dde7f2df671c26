use std::fmt::Write;

use super::ast::{default_type, Binder, Connective, Formula, Quantifier};
use super::theory::Theory;

const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;
const EQ: u8 = 6;
const APP: u8 = 7;
const ATOM: u8 = 8;

/// Renders a formula in the concrete syntax accepted by the parser, with
/// the fewest parentheses that parse back to the same tree.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    pr(f, IFF, true, &mut out);
    out
}

fn binder(b: &Binder, out: &mut String) {
    out.push_str(&b.name);
    if default_type(&b.name).as_ref() != Some(&b.ty) {
        let _ = write!(out, ":{}", b.ty);
    }
}

fn level(c: Connective) -> u8 {
    match c {
        Connective::Iff => IFF,
        Connective::Implies => IMP,
        Connective::Or => OR,
        Connective::And => AND,
    }
}

/// `min` is the weakest binding level allowed without parentheses; `tail`
/// says whether nothing follows in the enclosing context, which is the only
/// place a binder may appear bare because its body extends rightwards.
fn pr(f: &Formula, min: u8, tail: bool, out: &mut String) {
    let (lvl, is_binder) = match f {
        Formula::Binary(c, ..) => (level(*c), false),
        Formula::Not(_) | Formula::Necessarily(_) | Formula::Possibly(_) => (UNARY, false),
        Formula::Quant(..) | Formula::Lam(..) => (UNARY, true),
        Formula::Eq(..) | Formula::Neq(..) => (EQ, false),
        Formula::App(..) => (APP, false),
        Formula::Top | Formula::Bot | Formula::Var(_) | Formula::Sym(_) => (ATOM, false),
    };
    let paren = lvl < min || (is_binder && !tail);
    if paren {
        out.push('(');
    }
    let tail = tail || paren;
    match f {
        Formula::Top => out.push_str("top"),
        Formula::Bot => out.push_str("bot"),
        Formula::Var(n) | Formula::Sym(n) => out.push_str(n),
        Formula::Not(a) => {
            out.push_str("~ ");
            pr(a, UNARY, tail, out);
        }
        Formula::Necessarily(a) => {
            out.push_str("box ");
            pr(a, UNARY, tail, out);
        }
        Formula::Possibly(a) => {
            out.push_str("dia ");
            pr(a, UNARY, tail, out);
        }
        Formula::Binary(c, a, b) => {
            let l = level(*c);
            // `&` and `|` associate left; `->` and `<->` associate right.
            let (lmin, rmin) = match c {
                Connective::And | Connective::Or => (l, l + 1),
                Connective::Implies | Connective::Iff => (l + 1, l),
            };
            pr(a, lmin, false, out);
            let _ = write!(out, " {} ", c.symbol());
            pr(b, rmin, tail, out);
        }
        Formula::Eq(a, b) | Formula::Neq(a, b) => {
            pr(a, APP, false, out);
            out.push_str(if matches!(f, Formula::Eq(..)) { " = " } else { " != " });
            pr(b, APP, false, out);
        }
        Formula::Quant(q, b, body) => {
            out.push_str(match q {
                Quantifier::Forall => "all ",
                Quantifier::Exists => "ex ",
            });
            binder(b, out);
            out.push_str(". ");
            pr(body, IFF, true, out);
        }
        Formula::Lam(b, body) => {
            out.push('\\');
            binder(b, out);
            out.push_str(". ");
            pr(body, IFF, true, out);
        }
        Formula::App(g, a) => {
            pr(g, APP, false, out);
            out.push(' ');
            pr(a, ATOM, false, out);
        }
    }
    if paren {
        out.push(')');
    }
}

/// Renders a theory in the `.mthy` format.
pub fn print_theory(t: &Theory) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "theory {}", t.name);
    let _ = writeln!(out, "logic {}", t.logic);
    let _ = writeln!(out, "quant {}", t.quant);
    let _ = writeln!(out, "predicates {}", t.predicates);
    if !t.consts.is_empty() {
        out.push('\n');
    }
    for c in &t.consts {
        let _ = writeln!(out, "const {} : {}", c.name, c.ty);
    }
    if !t.defs.is_empty() {
        out.push('\n');
    }
    for d in &t.defs {
        let _ = write!(out, "def {}", d.name);
        for p in &d.params {
            if default_type(&p.name).as_ref() == Some(&p.ty) {
                let _ = write!(out, " {}", p.name);
            } else {
                let _ = write!(out, " ({}:{})", p.name, p.ty);
            }
        }
        let _ = writeln!(out, " := {}", print_formula(&d.body));
    }
    if !t.axioms.is_empty() {
        out.push('\n');
    }
    for a in &t.axioms {
        let _ = writeln!(out, "axiom {} : {}", a.name, print_formula(&a.formula));
    }
    if !t.conjectures.is_empty() {
        out.push('\n');
    }
    for c in &t.conjectures {
        let _ = writeln!(out, "conjecture {} : {}", c.name, print_formula(&c.formula));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{parse_formula, DeclContext, SurfaceType};
    use super::*;

    #[test]
    fn minimal_parentheses() {
        let ctx = DeclContext::default()
            .with_free("a", SurfaceType::Prop)
            .with_free("b", SurfaceType::Prop)
            .with_free("Q", SurfaceType::arrow(SurfaceType::property(), SurfaceType::Prop));
        for src in [
            "a & b -> a",
            "(a -> b) -> a",
            "a & (all s. s) -> b",
            "~ (a | b)",
            "box ex x. x = x",
            "box (ex x. x = x) & a",
            "Q (\\x. ~ x != x)",
            "all s. s -> box s",
            "all q:wo. q",
        ] {
            let f = parse_formula(src, &ctx).unwrap();
            assert_eq!(print_formula(&f), src);
        }
    }
}
