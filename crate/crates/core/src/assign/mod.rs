//! Intersection type assignment: derivations, a checker, bounded inference,
//! subject expansion and a finite view of filters.

mod derivation;
mod expand;
mod filter;
mod infer;

pub use derivation::{
    basis_join, check_derivation, parse_derivation, render_tree, Basis, DerivRule, Derivation, Judgment,
};
pub use expand::{expand_derivation, le_left, subject_reduction_probe, weaken, ReductionOutcome};
pub use filter::{filter_apply, filter_up, interpret_term_bounded, FilterApply, FilterRep};
pub use infer::{infer_bounded, infer_with, search_seeds, InferOutcome, Search};
