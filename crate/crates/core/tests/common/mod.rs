//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use omv_core::embed::{frame_constraint, Embedder, FrameClass, PredicateMode, QuantMode};
use omv_core::kernel::{eval, Assignment, Denotation, KripkeModel, SimpleType};
use omv_core::search::verify;
use omv_core::syntax::{Binder, Formula, Statement, SurfaceType};
use omv_core::{parse_theory, Theory};
use proptest::prelude::*;

/// Signature used by generated formulas.
pub const SIGNATURE: &str = "\
theory gen
const p : wo
const q : i>wo
const c : i
const P : (i>wo)>wo
";

/// [`SIGNATURE`] without the collection constant `P`.
pub const SMALL_SIGNATURE: &str = "\
theory gen_small
const p : wo
const q : i>wo
const c : i
";

pub fn gen_theory(logic: FrameClass, quant: QuantMode, predicates: PredicateMode) -> Theory {
    theory_from(SIGNATURE, logic, quant, predicates)
}

pub fn small_theory(logic: FrameClass, quant: QuantMode, predicates: PredicateMode) -> Theory {
    theory_from(SMALL_SIGNATURE, logic, quant, predicates)
}

fn theory_from(sig: &str, logic: FrameClass, quant: QuantMode, predicates: PredicateMode) -> Theory {
    parse_theory(sig)
        .unwrap()
        .with_logic(logic)
        .with_quant(quant)
        .with_predicates(predicates)
}

/// Builds a well-typed formula from a tape of choices. Shrinking the tape
/// shrinks the formula; an exhausted tape yields leaves.
pub struct Builder<'a> {
    tape: &'a [u8],
    pos: usize,
    indivs: Vec<String>,
    props: Vec<String>,
    sents: Vec<String>,
    fresh: usize,
    /// Whether generated formulas may use `P`.
    pub with_collection: bool,
}

impl<'a> Builder<'a> {
    pub fn new(tape: &'a [u8]) -> Self {
        Self {
            tape,
            pos: 0,
            indivs: Vec::new(),
            props: Vec::new(),
            sents: Vec::new(),
            fresh: 0,
            with_collection: true,
        }
    }

    /// Declares free variables the generated formula may mention.
    pub fn with_free(mut self, indivs: &[&str], props: &[&str]) -> Self {
        self.indivs.extend(indivs.iter().map(|s| s.to_string()));
        self.props.extend(props.iter().map(|s| s.to_string()));
        self
    }

    fn next(&mut self, n: u8) -> u8 {
        let v = self.tape.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        v % n
    }

    fn fresh(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    pub fn indiv(&mut self) -> Formula {
        let k = self.next(self.indivs.len() as u8 + 1) as usize;
        match self.indivs.get(k) {
            Some(v) => Formula::var(v.clone()),
            None => Formula::sym("c"),
        }
    }

    pub fn property(&mut self, depth: u32) -> Formula {
        match self.next(3) {
            0 => Formula::sym("q"),
            1 if !self.props.is_empty() => {
                let k = self.next(self.props.len() as u8) as usize;
                Formula::var(self.props[k].clone())
            }
            _ => {
                let x = self.fresh("x");
                self.indivs.push(x.clone());
                let body = self.formula(depth.saturating_sub(1));
                self.indivs.pop();
                Formula::lam(Binder::new(x, SurfaceType::Indiv), body)
            }
        }
    }

    /// A formula of type `wo`.
    pub fn formula(&mut self, depth: u32) -> Formula {
        if depth == 0 || self.pos >= self.tape.len() {
            return match self.next(4) {
                0 => Formula::Top,
                1 => Formula::Bot,
                2 => Formula::sym("p"),
                _ => Formula::app(Formula::sym("q"), self.indiv()),
            };
        }
        let d = depth - 1;
        match self.next(16) {
            0 => Formula::Top,
            1 => Formula::sym("p"),
            2 => Formula::app(Formula::sym("q"), self.indiv()),
            3 => Formula::not(self.formula(d)),
            4 => {
                let (a, b) = (self.formula(d), self.formula(d));
                match self.next(4) {
                    0 => Formula::and(a, b),
                    1 => Formula::or(a, b),
                    2 => Formula::implies(a, b),
                    _ => Formula::iff(a, b),
                }
            }
            5 => Formula::nec(self.formula(d)),
            6 => Formula::poss(self.formula(d)),
            7 => {
                let x = self.fresh("x");
                self.indivs.push(x.clone());
                let body = self.formula(d);
                self.indivs.pop();
                let b = Binder::new(x, SurfaceType::Indiv);
                if self.next(2) == 0 {
                    Formula::forall(b, body)
                } else {
                    Formula::exists(b, body)
                }
            }
            8 => {
                let (a, b) = (self.indiv(), self.indiv());
                if self.next(2) == 0 {
                    Formula::eq(a, b)
                } else {
                    Formula::neq(a, b)
                }
            }
            9 => {
                let f = self.property(d);
                Formula::app(f, self.indiv())
            }
            10 => {
                let ph = self.fresh("ph");
                self.props.push(ph.clone());
                let body = self.formula(d);
                self.props.pop();
                let b = Binder::new(ph, SurfaceType::property());
                if self.next(2) == 0 {
                    Formula::forall(b, body)
                } else {
                    Formula::exists(b, body)
                }
            }
            11 if self.with_collection => Formula::app(Formula::sym("P"), self.property(d)),
            12 if !self.sents.is_empty() => {
                let k = self.next(self.sents.len() as u8) as usize;
                Formula::var(self.sents[k].clone())
            }
            12 | 13 => {
                let s = self.fresh("s");
                self.sents.push(s.clone());
                let body = self.formula(d);
                self.sents.pop();
                let b = Binder::new(s, SurfaceType::Prop);
                if self.next(2) == 0 {
                    Formula::forall(b, body)
                } else {
                    Formula::exists(b, body)
                }
            }
            14 => {
                let x = self.fresh("x");
                self.indivs.push(x.clone());
                let body = self.formula(d);
                self.indivs.pop();
                let arg = self.indiv();
                Formula::app(Formula::lam(Binder::new(x, SurfaceType::Indiv), body), arg)
            }
            _ => Formula::Bot,
        }
    }
}

pub fn tape() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(any::<u8>(), 0..40)
}

/// A closed formula over [`SIGNATURE`].
pub fn closed_formula(tape: &[u8], depth: u32) -> Formula {
    Builder::new(tape).formula(depth)
}

pub fn closed_formula_without_collection(tape: &[u8], depth: u32) -> Formula {
    let mut b = Builder::new(tape);
    b.with_collection = false;
    b.formula(depth)
}

fn pick(ty: &SimpleType, w: usize, d: usize, seed: u64) -> Denotation {
    let size = ty.space_size(w as u64, d as u64).expect("small type");
    Denotation::from_index(ty, w, d, seed % size)
}

/// A model for [`SIGNATURE`] chosen by `seeds`; `total` forces the total
/// existence map.
pub fn model_from_seeds(w: usize, d: usize, seeds: &[u64; 6], total: bool) -> KripkeModel {
    let access: Vec<Vec<bool>> = (0..w)
        .map(|u| (0..w).map(|v| seeds[0] >> (u * w + v) & 1 == 1).collect())
        .collect();
    let exists: Vec<Vec<bool>> = (0..w)
        .map(|u| {
            let mut row: Vec<bool> = (0..d).map(|x| total || seeds[1] >> (u * d + x) & 1 == 1).collect();
            if !row.iter().any(|&b| b) {
                row[(seeds[1] as usize + u) % d] = true;
            }
            row
        })
        .collect();
    let theory = parse_theory(SIGNATURE).unwrap();
    let mut interp = BTreeMap::new();
    for (k, (name, ty)) in theory.kernel_signature().into_iter().enumerate() {
        interp.insert(name, pick(&ty, w, d, seeds[2 + k]));
    }
    KripkeModel::new(w, d, access, exists, interp, &theory.kernel_signature()).unwrap()
}

pub fn seeds() -> impl Strategy<Value = [u64; 6]> {
    any::<[u64; 6]>()
}

/// `theory` with the given formulas as axioms `A0`, `A1`, ...
pub fn with_axioms(theory: &Theory, axioms: Vec<Formula>) -> Theory {
    let mut t = theory.clone();
    t.axioms = axioms
        .into_iter()
        .enumerate()
        .map(|(i, formula)| Statement {
            name: format!("A{i}"),
            formula,
        })
        .collect();
    t
}

pub fn logic_of(k: u8) -> FrameClass {
    [FrameClass::K, FrameClass::KT, FrameClass::KB, FrameClass::S5][k as usize % 4]
}

/// Lifted truth value of a closed formula as a vector over worlds.
pub fn lifted(theory: &Theory, f: &Formula, m: &KripkeModel) -> Vec<bool> {
    let t = Embedder::for_theory(theory).embed(f).unwrap();
    let den = eval(&t, m, &Assignment::new()).unwrap();
    den.as_table().unwrap().iter().map(|b| b.as_bool().unwrap()).collect()
}

/// Every `w x w` relation in ascending row-major bit order, independent of
/// the search module's enumeration.
pub fn all_relations(w: usize) -> Vec<Vec<Vec<bool>>> {
    let bits = w * w;
    (0..1u32 << bits)
        .map(|m| {
            (0..w)
                .map(|u| (0..w).map(|v| m >> (bits - 1 - (u * w + v)) & 1 == 1).collect())
                .collect()
        })
        .collect()
}

pub fn in_frame(r: &[Vec<bool>], logic: FrameClass) -> bool {
    let n = r.len();
    let refl = (0..n).all(|u| r[u][u]);
    let sym = (0..n).all(|u| (0..n).all(|v| r[u][v] == r[v][u]));
    let trans = (0..n).all(|u| (0..n).all(|v| (0..n).all(|t| !(r[u][v] && r[v][t]) || r[u][t])));
    match logic {
        FrameClass::K => true,
        FrameClass::KT => refl,
        FrameClass::KB => sym,
        FrameClass::S5 => refl && sym && trans,
    }
}

fn all_existence(w: usize, d: usize, quant: QuantMode) -> Vec<Vec<Vec<bool>>> {
    if quant == QuantMode::Possibilist {
        return vec![vec![vec![true; d]; w]];
    }
    let bits = w * d;
    (0..1u32 << bits)
        .map(|m| {
            (0..w)
                .map(|u| (0..d).map(|x| m >> (bits - 1 - (u * d + x)) & 1 == 1).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        })
        .filter(|e: &Vec<Vec<bool>>| e.iter().all(|row| row.iter().any(|&b| b)))
        .collect()
}

/// Values a constant may take: world-independent ones only for rigid
/// predicates.
fn candidate_values(ty: &SimpleType, w: usize, d: usize, rigid: bool) -> Vec<Denotation> {
    let size = ty.space_size(w as u64, d as u64).unwrap();
    (0..size)
        .map(|k| Denotation::from_index(ty, w, d, k))
        .filter(|den| {
            !rigid
                || den
                    .as_table()
                    .unwrap()
                    .iter()
                    .all(|e| e.as_table().unwrap().windows(2).all(|p| p[0] == p[1]))
        })
        .collect()
}

/// Brute force: every model of `theory` with at most the given sizes,
/// filtered by evaluating each axiom with the reference evaluator.
pub fn naive_models(theory: &Theory, max_w: usize, max_d: usize) -> Vec<KripkeModel> {
    let sig = theory.kernel_signature();
    let mut out = Vec::new();
    for w in 1..=max_w {
        for d in 1..=max_d {
            let choices: Vec<Vec<Denotation>> = theory
                .consts
                .iter()
                .map(|c| {
                    let rigid = theory.predicates == PredicateMode::Rigid && c.ty.is_predicate();
                    candidate_values(&c.ty.to_kernel(), w, d, rigid)
                })
                .collect();
            for r in all_relations(w).into_iter().filter(|r| in_frame(r, theory.logic)) {
                for e in all_existence(w, d, theory.quant) {
                    let mut idx = vec![0usize; choices.len()];
                    loop {
                        let interp = sig
                            .iter()
                            .zip(&idx)
                            .zip(&choices)
                            .map(|(((n, _), &i), ch)| (n.clone(), ch[i].clone()))
                            .collect();
                        let m = KripkeModel::new(w, d, r.clone(), e.clone(), interp, &sig).unwrap();
                        assert!(frame_constraint(&m, theory.logic));
                        if verify(theory, &m, None, 1 << 24).unwrap().failed_axioms.is_empty() {
                            out.push(m);
                        }
                        let mut k = idx.len();
                        loop {
                            if k == 0 {
                                break;
                            }
                            k -= 1;
                            idx[k] += 1;
                            if idx[k] < choices[k].len() {
                                break;
                            }
                            idx[k] = 0;
                        }
                        if idx.iter().all(|&i| i == 0) {
                            break;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Sort key for comparing model sets.
pub type ModelKey = (usize, usize, Vec<Vec<bool>>, Vec<Vec<bool>>, Vec<Denotation>);

pub fn model_key(theory: &Theory, m: &KripkeModel) -> ModelKey {
    (
        m.worlds,
        m.individuals,
        m.access.clone(),
        m.exists.clone(),
        theory.consts.iter().map(|c| m.interp[&c.name].clone()).collect(),
    )
}
