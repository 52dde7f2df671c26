use super::ast::{Binder, Formula, SurfaceType};
use crate::embed::{FrameClass, PredicateMode, QuantMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstDecl {
    pub name: String,
    pub ty: SurfaceType,
}

/// A non-recursive abbreviation `name params := body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub params: Vec<Binder>,
    pub body: Formula,
    /// Type of the whole abbreviation, parameters included.
    pub ty: SurfaceType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub name: String,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub logic: FrameClass,
    pub quant: QuantMode,
    pub predicates: PredicateMode,
    pub consts: Vec<ConstDecl>,
    pub defs: Vec<Definition>,
    pub axioms: Vec<Statement>,
    pub conjectures: Vec<Statement>,
}

impl Theory {
    pub fn const_type(&self, name: &str) -> Option<&SurfaceType> {
        self.consts.iter().find(|c| c.name == name).map(|c| &c.ty)
    }

    pub fn definition(&self, name: &str) -> Option<&Definition> {
        self.defs.iter().find(|d| d.name == name)
    }

    pub fn axiom(&self, name: &str) -> Option<&Statement> {
        self.axioms.iter().find(|s| s.name == name)
    }

    pub fn conjecture(&self, name: &str) -> Option<&Statement> {
        self.conjectures.iter().find(|s| s.name == name)
    }

    /// Looks a name up among axioms first, then conjectures.
    pub fn statement(&self, name: &str) -> Option<&Statement> {
        self.axiom(name).or_else(|| self.conjecture(name))
    }

    /// The same theory with its axioms replaced by the named statements,
    /// which may be axioms or conjectures. Returns the first unknown name
    /// on failure.
    pub fn with_premises<S: AsRef<str>>(&self, premises: &[S]) -> Result<Theory, String> {
        let axioms = premises
            .iter()
            .map(|p| self.statement(p.as_ref()).cloned().ok_or_else(|| p.as_ref().to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Theory {
            axioms,
            ..self.clone()
        })
    }

    pub fn with_logic(mut self, logic: FrameClass) -> Theory {
        self.logic = logic;
        self
    }

    pub fn with_predicates(mut self, predicates: PredicateMode) -> Theory {
        self.predicates = predicates;
        self
    }

    pub fn with_quant(mut self, quant: QuantMode) -> Theory {
        self.quant = quant;
        self
    }

    /// Constant signature in the kernel's types.
    pub fn kernel_signature(&self) -> Vec<(String, crate::kernel::SimpleType)> {
        self.consts
            .iter()
            .map(|c| (c.name.clone(), c.ty.to_kernel()))
            .collect()
    }
}
