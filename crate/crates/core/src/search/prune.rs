//! Structural recognition of the complement axiom
//! `all ph. P (\x. ~ ph x) <-> ~ P ph`, which lets the search pick one
//! member of every complement pair of properties and derive the other.

use crate::syntax::{Binder, Connective, Formula, Quantifier, SurfaceType, Theory};

fn is_complement_side(f: &Formula, p: &str, ph: &str) -> bool {
    // P (\x. ~ ph x)
    let Formula::App(head, arg) = f else { return false };
    if !matches!(&**head, Formula::Sym(s) if s == p) {
        return false;
    }
    let Formula::Lam(Binder { name: x, ty: SurfaceType::Indiv }, body) = &**arg else {
        return false;
    };
    let Formula::Not(inner) = &**body else { return false };
    let Formula::App(g, a) = &**inner else { return false };
    matches!(&**g, Formula::Var(v) if v == ph) && matches!(&**a, Formula::Var(v) if v == x)
}

fn is_negated_side(f: &Formula, p: &str, ph: &str) -> bool {
    // ~ P ph
    let Formula::Not(inner) = f else { return false };
    let Formula::App(head, arg) = &**inner else { return false };
    matches!(&**head, Formula::Sym(s) if s == p) && matches!(&**arg, Formula::Var(v) if v == ph)
}

/// The constant constrained by `f` if `f` is the complement axiom.
pub fn complement_axiom_target(f: &Formula, theory: &Theory) -> Option<String> {
    let Formula::Quant(Quantifier::Forall, b, body) = f else { return None };
    if b.ty != SurfaceType::property() {
        return None;
    }
    let Formula::Binary(Connective::Iff, l, r) = &**body else { return None };
    let head_symbol = |side: &Formula| {
        let app = match side {
            Formula::Not(inner) => &**inner,
            other => other,
        };
        match app {
            Formula::App(head, _) => match &**head {
                Formula::Sym(s) => Some(s.clone()),
                _ => None,
            },
            _ => None,
        }
    };
    let p = head_symbol(l)?;
    if theory.const_type(&p) != Some(&SurfaceType::collection()) {
        return None;
    }
    let matched = (is_complement_side(l, &p, &b.name) && is_negated_side(r, &p, &b.name))
        || (is_negated_side(l, &p, &b.name) && is_complement_side(r, &p, &b.name));
    matched.then_some(p)
}

/// Constants whose interpretation is closed under complement pairs because
/// some axiom of `theory` says so.
pub fn complement_constrained(theory: &Theory) -> Vec<String> {
    let mut out: Vec<String> = theory
        .axioms
        .iter()
        .filter_map(|a| complement_axiom_target(&a.formula, theory))
        .collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_theory;

    fn theory(axiom: &str) -> Theory {
        parse_theory(&format!("theory t\nconst P : (i>wo)>wo\naxiom a : {axiom}\n")).unwrap()
    }

    #[test]
    fn recognises_both_orientations() {
        for src in [
            r"all ph. P (\x. ~ ph x) <-> ~ P ph",
            r"all ph. ~ P ph <-> P (\x. ~ ph x)",
        ] {
            let t = theory(src);
            assert_eq!(complement_constrained(&t), vec!["P".to_string()], "{src}");
        }
    }

    #[test]
    fn rejects_near_misses() {
        for src in [
            r"all ph. P (\x. ph x) <-> ~ P ph",
            r"all ph. P (\x. ~ ph x) -> ~ P ph",
            r"all ph. P (\x. ~ ph x) <-> P ph",
            r"ex ph. P (\x. ~ ph x) <-> ~ P ph",
        ] {
            assert!(complement_constrained(&theory(src)).is_empty(), "{src}");
        }
    }
}
