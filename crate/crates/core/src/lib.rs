//! Bounded verification of higher-order modal theories.
//!
//! Modal formulas are compiled into a classical higher-order core by a
//! shallow semantic embedding, evaluated over finite Kripke models, and
//! searched exhaustively for models and countermodels.

pub mod embed;
pub mod kernel;
pub mod parallel;
pub mod report;
pub mod search;
pub mod suite;
pub mod syntax;

pub use embed::{Embedder, FrameClass, PredicateMode, QuantMode};
pub use kernel::{Denotation, KripkeModel, SimpleType, Term};
pub use search::{Bounds, Verdict};
pub use syntax::{parse_formula, parse_theory, Formula, Theory};
