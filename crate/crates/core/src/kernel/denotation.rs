use std::fmt;
use std::ops::Range;

use super::{KernelError, SimpleType};

/// Denotation of a value in a finite standard model.
///
/// A function is represented by its full table, indexed by the canonical
/// enumeration of its domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Denotation {
    Bool(bool),
    World(usize),
    Indiv(usize),
    Table(Vec<Denotation>),
}

impl Denotation {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Denotation::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_table(&self) -> Option<&[Denotation]> {
        match self {
            Denotation::Table(t) => Some(t),
            _ => None,
        }
    }

    /// Applies a table to an argument by looking up the argument's
    /// canonical index in the domain.
    pub fn apply(&self, domain: &SimpleType, arg: &Denotation, w: usize, d: usize) -> Denotation {
        let table = self.as_table().expect("application of a non-table denotation");
        let idx = arg.index(domain, w, d) as usize;
        table[idx].clone()
    }

    /// Whether this is a valid denotation of `ty` at the given sizes.
    pub fn is_valid(&self, ty: &SimpleType, w: usize, d: usize) -> bool {
        match (self, ty) {
            (Denotation::Bool(_), SimpleType::Bool) => true,
            (Denotation::World(i), SimpleType::World) => *i < w,
            (Denotation::Indiv(i), SimpleType::Indiv) => *i < d,
            (Denotation::Table(entries), SimpleType::Fun(a, b)) => {
                a.space_size(w as u64, d as u64) == Some(entries.len() as u64)
                    && entries.iter().all(|e| e.is_valid(b, w, d))
            }
            _ => false,
        }
    }

    /// Position of this denotation in the canonical enumeration of `ty`.
    ///
    /// Tables are ordered lexicographically by their entries, the entry for
    /// the first domain element being most significant.
    pub fn index(&self, ty: &SimpleType, w: usize, d: usize) -> u64 {
        match (self, ty) {
            (Denotation::Bool(b), SimpleType::Bool) => u64::from(*b),
            (Denotation::World(i), SimpleType::World) | (Denotation::Indiv(i), SimpleType::Indiv) => {
                *i as u64
            }
            (Denotation::Table(entries), SimpleType::Fun(_, b)) => {
                let base = b
                    .space_size(w as u64, d as u64)
                    .expect("codomain size overflow");
                entries
                    .iter()
                    .fold(0u64, |acc, e| acc * base + e.index(b, w, d))
            }
            (den, ty) => panic!("denotation {den} is not of type {ty}"),
        }
    }

    /// Inverse of [`Denotation::index`].
    pub fn from_index(ty: &SimpleType, w: usize, d: usize, mut code: u64) -> Denotation {
        match ty {
            SimpleType::Bool => Denotation::Bool(code != 0),
            SimpleType::World => Denotation::World(code as usize),
            SimpleType::Indiv => Denotation::Indiv(code as usize),
            SimpleType::Fun(a, b) => {
                let n = a.space_size(w as u64, d as u64).expect("domain size overflow") as usize;
                let base = b.space_size(w as u64, d as u64).expect("codomain size overflow");
                let mut entries = vec![Denotation::Bool(false); n];
                for slot in entries.iter_mut().rev() {
                    *slot = Denotation::from_index(b, w, d, code % base);
                    code /= base;
                }
                Denotation::Table(entries)
            }
        }
    }
}

impl fmt::Display for Denotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Denotation::Bool(b) => write!(f, "{}", u8::from(*b)),
            Denotation::World(i) => write!(f, "w{i}"),
            Denotation::Indiv(i) => write!(f, "e{i}"),
            Denotation::Table(entries) => {
                write!(f, "[")?;
                for (i, e) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Canonical-order stream over every denotation of a type.
#[derive(Debug, Clone)]
pub struct Denotations {
    ty: SimpleType,
    worlds: usize,
    individuals: usize,
    range: Range<u64>,
}

impl Iterator for Denotations {
    type Item = Denotation;

    fn next(&mut self) -> Option<Denotation> {
        let code = self.range.next()?;
        Some(Denotation::from_index(&self.ty, self.worlds, self.individuals, code))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.range.size_hint()
    }
}

impl ExactSizeIterator for Denotations {}

/// Every denotation of `ty` in canonical order.
///
/// Fails with `BoundOverflow` when the space exceeds `ceiling`.
pub fn enumerate_denotations(
    ty: &SimpleType,
    worlds: usize,
    individuals: usize,
    ceiling: u64,
) -> Result<Denotations, KernelError> {
    let size = ty.bounded_space_size(worlds as u64, individuals as u64, ceiling)?;
    Ok(Denotations {
        ty: ty.clone(),
        worlds,
        individuals,
        range: 0..size,
    })
}

/// A chunk of the canonical enumeration; chunks are independently
/// re-creatable by separate workers.
pub fn enumerate_chunk(
    ty: &SimpleType,
    worlds: usize,
    individuals: usize,
    ceiling: u64,
    chunk: Range<u64>,
) -> Result<Denotations, KernelError> {
    let size = ty.bounded_space_size(worlds as u64, individuals as u64, ceiling)?;
    Ok(Denotations {
        ty: ty.clone(),
        worlds,
        individuals,
        range: chunk.start.min(size)..chunk.end.min(size),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const CEIL: u64 = 1 << 24;

    #[test]
    fn small_stream_lengths() {
        assert_eq!(enumerate_denotations(&SimpleType::Bool, 3, 3, CEIL).unwrap().count(), 2);
        let lifted = SimpleType::lifted_bool();
        assert_eq!(enumerate_denotations(&lifted, 2, 1, CEIL).unwrap().count(), 4);
    }

    #[test]
    fn intensional_properties_are_distinct_and_complete() {
        let all: Vec<_> = enumerate_denotations(&SimpleType::property(), 2, 2, CEIL)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 16);
        let distinct: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 16);
        assert!(all.iter().all(|p| p.is_valid(&SimpleType::property(), 2, 2)));
    }

    #[test]
    fn order_is_lexicographic_on_entries() {
        let all: Vec<_> = enumerate_denotations(&SimpleType::lifted_bool(), 2, 1, CEIL)
            .unwrap()
            .collect();
        let b = Denotation::Bool;
        assert_eq!(all[0], Denotation::Table(vec![b(false), b(false)]));
        assert_eq!(all[1], Denotation::Table(vec![b(false), b(true)]));
        assert_eq!(all[2], Denotation::Table(vec![b(true), b(false)]));
        assert_eq!(all[3], Denotation::Table(vec![b(true), b(true)]));
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn index_round_trips() {
        let ty = SimpleType::fun(SimpleType::property(), SimpleType::Bool);
        for (i, den) in enumerate_chunk(&ty, 1, 2, CEIL, 100..140).unwrap().enumerate() {
            assert_eq!(den.index(&ty, 1, 2), 100 + i as u64);
        }
    }

    #[test]
    fn overflow_is_an_error() {
        let coll = SimpleType::fun(SimpleType::property(), SimpleType::lifted_bool());
        assert!(matches!(
            enumerate_denotations(&coll, 2, 2, CEIL),
            Err(KernelError::BoundOverflow { .. })
        ));
    }

    #[test]
    fn apply_looks_up_domain_index() {
        let ty = SimpleType::fun(SimpleType::World, SimpleType::Bool);
        let table = Denotation::from_index(&ty, 3, 1, 0b010);
        assert_eq!(table.apply(&SimpleType::World, &Denotation::World(1), 3, 1), Denotation::Bool(true));
        assert_eq!(table.apply(&SimpleType::World, &Denotation::World(2), 3, 1), Denotation::Bool(false));
    }
}
