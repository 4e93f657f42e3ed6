//! Subtyping in a theory: saturation over a finite universe of types, proof
//! certificates with an independent checker, and bounded probes for
//! β-soundness and the set condition.

mod probes;
mod proof;
mod saturate;
mod universe;

pub use probes::{
    beta_instance_counterexample, beta_soundness_probe, set_condition_probe, set_instance_counterexample, BetaCounterexample,
    ProbeOutcome, SetCounterexample,
};
pub use proof::{
    canonical_witness, check_subproof, check_subproof_strict, parse_subproof, CheckResult,
    SubProof, SubRule,
};
pub(crate) use proof::{parse_subproof_prefix, project_nth};
pub use saturate::{derive_equiv, derive_le, is_top_equiv, Saturation, SubtypeVerdict};
pub use universe::{
    build_universe, build_universe_capped, Universe, DEFAULT_INTER_WIDTH, DEFAULT_UNIVERSE_CAP,
};
