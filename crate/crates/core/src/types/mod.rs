//! Intersection types, canonical forms and theory descriptions.

mod natural;
mod theory;
mod ty;

pub use natural::{validate_natural, TOP_NAME};
pub use theory::{parse_theory, AxiomDecl, AxiomKind, RuleFlag, TheorySpec};
pub use ty::{canonicalize, parse_ty, Ty};

pub(crate) use ty::parse_ty_prefix;
