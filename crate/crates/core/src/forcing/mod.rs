//! The forcing relation and everything that checks it.
//!
//! - [`Forcer`] evaluates the recursively defined relation `p ⊩* φ`, memoizing
//!   atomic tuples and asserting the well-order on them at every recursive
//!   step.
//! - [`Semantics`] evaluates `φ` in the generic extension of every generic
//!   filter and derives the semantic relation `p ⊩ φ` from that.
//! - [`materialize_tables`] builds the staged membership and equality tables
//!   bottom-up, independently of the evaluator.
//! - [`lemmas`] compares all of the above.

mod generic;
pub mod lemmas;
mod semantic;
mod star;
mod tables;

use thiserror::Error;

use crate::logic::SortError;

pub use generic::{enumerate_generics, is_generic, is_generic_exhaustive, GenericFilter};
pub use semantic::{eval_extension, Semantics};
pub use star::{tuple_less, AtomKey, Forcer};
pub use tables::{materialize_tables, ForcingTables};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForcingError {
    #[error("name `{0}` is not in the universe")]
    NameOutsideUniverse(String),
    #[error("formula has free variables: {0}")]
    OpenFormula(String),
    #[error("too many subsets to enumerate ({size} elements, cap {cap})")]
    CapExceeded { size: usize, cap: usize },
    #[error(transparent)]
    Sort(#[from] SortError),
}
