use std::collections::BTreeMap;

use super::{Denotation, KernelError, SimpleType};

/// Reserved name of the accessibility relation, `World -> World -> Bool`.
pub const ACCESS: &str = "R";
/// Reserved name of the existence predicate, `Indiv -> World -> Bool`.
pub const EXISTS: &str = "E";

pub fn access_type() -> SimpleType {
    SimpleType::fun(SimpleType::World, SimpleType::lifted_bool())
}

pub fn exists_type() -> SimpleType {
    SimpleType::property()
}

/// A finite Kripke model with interpretations for the uninterpreted
/// constants of a theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    pub worlds: usize,
    pub individuals: usize,
    /// `access[u][v]` iff `v` is reachable from `u`.
    pub access: Vec<Vec<bool>>,
    /// `exists[w][x]` iff individual `x` exists at world `w`.
    pub exists: Vec<Vec<bool>>,
    pub interp: BTreeMap<String, Denotation>,
}

impl KripkeModel {
    /// Builds a model, checking shapes, nonempty existence at every world
    /// and that `interp` covers exactly `signature`.
    pub fn new(
        worlds: usize,
        individuals: usize,
        access: Vec<Vec<bool>>,
        exists: Vec<Vec<bool>>,
        interp: BTreeMap<String, Denotation>,
        signature: &[(String, SimpleType)],
    ) -> Result<Self, KernelError> {
        let bad = |msg: String| Err(KernelError::InvalidModel(msg));
        if worlds == 0 || individuals == 0 {
            return bad("a model needs at least one world and one individual".into());
        }
        if access.len() != worlds || access.iter().any(|row| row.len() != worlds) {
            return bad(format!("accessibility must be a {worlds}x{worlds} matrix"));
        }
        if exists.len() != worlds || exists.iter().any(|row| row.len() != individuals) {
            return bad(format!("existence must be a {worlds}x{individuals} matrix"));
        }
        if let Some(w) = exists.iter().position(|row| !row.iter().any(|&e| e)) {
            return bad(format!("no individual exists at world {w}"));
        }
        for (name, ty) in signature {
            match interp.get(name) {
                None => return Err(KernelError::MissingInterpretation(name.clone())),
                Some(den) if !den.is_valid(ty, worlds, individuals) => {
                    return bad(format!("interpretation of {name} is not a denotation of {ty}"))
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = interp.keys().find(|k| !signature.iter().any(|(n, _)| n == *k)) {
            return bad(format!("interpretation given for undeclared constant {extra}"));
        }
        Ok(Self {
            worlds,
            individuals,
            access,
            exists,
            interp,
        })
    }

    pub fn access_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for (u, row) in self.access.iter().enumerate() {
            for (v, &r) in row.iter().enumerate() {
                if r {
                    pairs.push((u, v));
                }
            }
        }
        pairs
    }

    pub fn existing_at(&self, world: usize) -> Vec<usize> {
        self.exists[world]
            .iter()
            .enumerate()
            .filter_map(|(x, &e)| e.then_some(x))
            .collect()
    }

    /// Denotation of a constant, including the reserved `R` and `E`.
    pub fn constant(&self, name: &str) -> Option<Denotation> {
        match name {
            ACCESS => Some(Denotation::Table(
                self.access
                    .iter()
                    .map(|row| Denotation::Table(row.iter().map(|&b| Denotation::Bool(b)).collect()))
                    .collect(),
            )),
            EXISTS => Some(Denotation::Table(
                (0..self.individuals)
                    .map(|x| {
                        Denotation::Table(
                            (0..self.worlds)
                                .map(|w| Denotation::Bool(self.exists[w][x]))
                                .collect(),
                        )
                    })
                    .collect(),
            )),
            _ => self.interp.get(name).cloned(),
        }
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.worlds).all(|u| self.access[u][u])
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.worlds).all(|u| (0..self.worlds).all(|v| self.access[u][v] == self.access[v][u]))
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.worlds;
        (0..n).all(|u| {
            (0..n).all(|v| !self.access[u][v] || (0..n).all(|t| !self.access[v][t] || self.access[u][t]))
        })
    }
}
