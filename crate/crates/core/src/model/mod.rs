//! Core data model: terms, atoms, rules, ground programs, the atom
//! interner and the predicate dependency graph.

mod graph;
mod ground;
mod rule;
mod subst;
mod term;

use thiserror::Error;

pub use graph::{DependencyEdge, Polarity, PredicateDependencyGraph};
pub use ground::{AnswerSet, DisplayRule, FactSet, GroundAtom, GroundAtomId, GroundProgram, GroundRule, Interner};
pub use rule::{Atom, CmpOp, Literal, NonGroundProgram, Predicate, Rule};
pub use subst::{compare, eval_comparison, match_atom, Substitution};
pub use term::{ArithOp, Symbol, Term, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("cannot intern non-ground atom {0}")]
    NonGround(String),
}

/// Failures while evaluating terms under a substitution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("arithmetic on non-integer term {0}")]
    NonInteger(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("{0} is not a comparison")]
    NotAComparison(String),
}

pub fn sym(s: &str) -> Symbol {
    Symbol::from(s)
}
