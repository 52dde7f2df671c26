//! Simply-typed classical higher-order core over finite standard models.

mod denotation;
pub mod eval;
pub mod model;
mod term;
mod types;

use thiserror::Error;

pub use denotation::{enumerate_chunk, enumerate_denotations, Denotation, Denotations};
pub use eval::{eval, eval_with_ceiling, Assignment, DEFAULT_CEILING};
pub use model::KripkeModel;
pub use term::{typecheck, NameSupply, Term, TypeContext};
pub use types::SimpleType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("type mismatch at {location}: expected {expected}, found {found}")]
    TypeMismatch {
        location: String,
        expected: SimpleType,
        found: SimpleType,
    },
    #[error("{location} has type {found} and cannot be applied")]
    NotAFunction { location: String, found: SimpleType },
    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error("denotation space of {ty} at {worlds} worlds, {individuals} individuals exceeds the ceiling of {ceiling}")]
    BoundOverflow {
        ty: SimpleType,
        worlds: u64,
        individuals: u64,
        ceiling: u64,
    },
    #[error("model does not interpret `{0}`")]
    MissingInterpretation(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}
