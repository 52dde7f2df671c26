//! Concrete syntax of `.mthy` theory files: AST, parser, pretty printer.
//!
//! ```text
//! theory NAME
//! logic K | KT | KB | S5
//! quant possibilist | actualist
//! predicates rigid | flexible
//! const NAME : TYPE
//! def NAME PARAM* := FORMULA          PARAM = v | (v:TYPE)
//! axiom NAME : FORMULA
//! conjecture NAME : FORMULA
//! ```
//!
//! Types are `i`, `wo`, `coll` (= `(i>wo)>wo`) and right-associative `a>b`.
//! Formulas, loosest first: `<->`, `->`, `|`, `&`, then the prefixes
//! `~ box dia`, binders `all v[:T]. F`, `ex v[:T]. F`, `\v[:T]. F` whose
//! bodies extend right, equality `t = t` / `t != t`, application by
//! juxtaposition, and atoms `top`, `bot`, names and parenthesised formulas.
//! `#` starts a line comment.

pub mod ast;
mod lexer;
mod parser;
mod printer;
mod theory;

use std::fmt;

pub use ast::{default_type, Binder, Connective, Formula, Quantifier, SurfaceType};
pub use parser::{parse_formula, parse_term, parse_theory, parse_type, DeclContext};
pub use printer::{print_formula, print_theory};
pub use theory::{ConstDecl, Definition, Statement, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    UnboundName,
    DuplicateName,
    RecursiveDefinition,
    Sort,
}

/// A located error in theory or formula text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct SourceError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
    pub kind: ErrorKind,
}

impl SourceError {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>, expected: Vec<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
            expected,
            kind: ErrorKind::Syntax,
        }
    }

    pub(crate) fn duplicate(tok: &lexer::Token, name: &str) -> Self {
        Self {
            line: tok.line,
            column: tok.column,
            message: format!("`{name}` is already declared"),
            expected: vec![],
            kind: ErrorKind::DuplicateName,
        }
    }
}

impl fmt::Display for SourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}
