//! Exact symbolic engine for higher-order forms.
//!
//! Forms are opaque atoms carrying declared transformation laws; the group
//! is modelled as a free group on abstract letters, so every identity
//! verified here follows from the group-ring calculus alone.

pub mod basis;
pub mod expr;
pub mod flaw;
pub mod lemma38;
pub mod slash;
pub mod word;

use thiserror::Error;

use crate::index::IndexError;

pub use basis::{BasisEnv, Monomial, Recipe, TopValue};
pub use expr::{Atom, FormalExpr, PeriodSymbol, SymbolKind, Term, Terminal};
pub use slash::Engine;
pub use word::{FormalWord, GroupRing, Letter, LetterKind};

#[derive(Debug, Error)]
pub enum FormalError {
    #[error("no transformation law: {0}")]
    NoLaw(String),
    #[error("correction system for {0} is not solvable")]
    Unsolvable(String),
    #[error("{0} is not in the required index set")]
    NotAdmissible(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}
