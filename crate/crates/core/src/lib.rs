//! Class forcing over finite posets with hereditarily finite names.
//!
//! The crate builds finite partial orders ([`order`]), names and their
//! interpretations ([`names`]), a two-sorted first/second-order language
//! ([`logic`]), the forcing relation with its lemma checkers ([`forcing`]),
//! and checkers for pretameness, tameness and distributivity ([`tameness`])
//! and weak homogeneity ([`homogeneity`]).

pub mod corpus;
pub mod forcing;
pub mod hf;
pub mod homogeneity;
pub mod instance;
pub mod logic;
pub mod names;
pub mod order;
pub mod report;
pub mod tameness;

pub use hf::HfSet;
pub use report::{Report, Violation};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/posets.md")]
    mod posets {}
    #[doc = include_str!("../../../book/src/names.md")]
    mod names {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/forcing.md")]
    mod forcing {}
    #[doc = include_str!("../../../book/src/tameness.md")]
    mod tameness {}
    #[doc = include_str!("../../../book/src/homogeneity.md")]
    mod homogeneity {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
}
