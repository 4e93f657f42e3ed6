//! Intersection type theories, their type assignment systems and the
//! machinery for deciding (or bounding) sensibility.
//!
//! The crate is organised bottom-up:
//!
//! * [`lambda`]: λ-terms and head reduction.
//! * [`types`]: intersection types and theory descriptions.
//! * [`subtype`]: subtyping by saturation, with checkable proofs.
//! * [`assign`]: type assignment derivations, bounded search, filters.
//! * [`polarity`]: characteristic sets, equivalence classes, polarity.
//! * [`embed`]: embeddings between theories.
//! * [`sensibility`]: the verdict pipeline and the built-in corpus.
//! * [`report`]: versioned JSON reports.

pub mod assign;
pub mod embed;
pub mod error;
pub mod lambda;
pub(crate) mod lex;
pub mod par;
pub mod polarity;
pub mod report;
pub mod sensibility;
pub mod subtype;
pub mod types;

pub use error::{Error, ParseError, Result};
