use std::fmt;

use super::KernelError;

/// Types of the classical higher-order core.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleType {
    Bool,
    World,
    Indiv,
    Fun(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn fun(domain: SimpleType, codomain: SimpleType) -> Self {
        SimpleType::Fun(Box::new(domain), Box::new(codomain))
    }

    /// World-lifted truth values, `World -> Bool`.
    pub fn lifted_bool() -> Self {
        Self::fun(SimpleType::World, SimpleType::Bool)
    }

    /// Intensional properties, `Indiv -> World -> Bool`.
    pub fn property() -> Self {
        Self::fun(SimpleType::Indiv, Self::lifted_bool())
    }

    pub fn is_lifted_bool(&self) -> bool {
        *self == Self::lifted_bool()
    }

    pub fn as_fun(&self) -> Option<(&SimpleType, &SimpleType)> {
        match self {
            SimpleType::Fun(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Size of the denotation space at `worlds` worlds and `individuals`
    /// individuals, or `None` if it does not fit in a `u64`.
    pub fn space_size(&self, worlds: u64, individuals: u64) -> Option<u64> {
        match self {
            SimpleType::Bool => Some(2),
            SimpleType::World => Some(worlds),
            SimpleType::Indiv => Some(individuals),
            SimpleType::Fun(a, b) => {
                let n = a.space_size(worlds, individuals)?;
                let m = b.space_size(worlds, individuals)?;
                let exp = u32::try_from(n).ok()?;
                m.checked_pow(exp)
            }
        }
    }

    /// Base-2 logarithm of the space size as a float; never overflows.
    pub fn log2_space_size(&self, worlds: u64, individuals: u64) -> f64 {
        match self {
            SimpleType::Bool => 1.0,
            SimpleType::World => (worlds as f64).log2(),
            SimpleType::Indiv => (individuals as f64).log2(),
            SimpleType::Fun(a, b) => {
                let la = a.log2_space_size(worlds, individuals);
                b.log2_space_size(worlds, individuals) * la.exp2()
            }
        }
    }

    /// Space size checked against an enumeration ceiling.
    pub fn bounded_space_size(
        &self,
        worlds: u64,
        individuals: u64,
        ceiling: u64,
    ) -> Result<u64, KernelError> {
        match self.space_size(worlds, individuals) {
            Some(n) if n <= ceiling => Ok(n),
            _ => Err(KernelError::BoundOverflow {
                ty: self.clone(),
                worlds,
                individuals,
                ceiling,
            }),
        }
    }

    /// Order of the type: base types are order 0, `a -> b` is
    /// `max(order(a) + 1, order(b))`.
    pub fn order(&self) -> usize {
        match self {
            SimpleType::Fun(a, b) => (a.order() + 1).max(b.order()),
            _ => 0,
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Bool => write!(f, "o"),
            SimpleType::World => write!(f, "w"),
            SimpleType::Indiv => write!(f, "i"),
            SimpleType::Fun(a, b) => match **a {
                SimpleType::Fun(..) => write!(f, "({a})>{b}"),
                _ => write!(f, "{a}>{b}"),
            },
        }
    }
}
