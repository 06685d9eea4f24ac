//! First-order predicate calculus: lambda-expression attachments, formulas,
//! canonical forms, finite-model evaluation, forward-chaining inference and
//! syntax-directed composition over parse trees.

mod compose;
mod expr;
mod formula;
mod infer;
mod model;

use thiserror::Error;

pub use compose::compose;
pub use expr::{Expr, DEFAULT_STEP_BUDGET};
pub use formula::{canonical_formula, canonicalize, Formula, Term};
pub use infer::{forward_closure, infer, GroundAtom};
pub use model::{evaluate, Assignment, WorldModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("beta reduction did not terminate within {0} steps")]
    NonTerminating(usize),
    #[error("not a formula: {0}")]
    NotAFormula(String),
    #[error("free variable `{0}`")]
    FreeVariable(String),
    #[error("uninterpreted symbol `{0}`")]
    UninterpretedSymbol(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("`{name}` used with {found} arguments, expected {expected}")]
    ArityError {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unsupported formula for inference: {0}")]
    UnsupportedFormula(String),
    #[error("invalid world model: {0}")]
    InvalidModel(String),
    #[error("no semantic attachment for {0}")]
    MissingAttachment(String),
    #[error("composition left free variables: {}", .0.join(", "))]
    NonClosedResult(Vec<String>),
}
