//! Generators, brute-force oracles and property bodies shared by the
//! integration test targets.
#![allow(dead_code)]

pub mod gen;
pub mod oracle;
pub mod props;

use std::path::PathBuf;

use itt_core::sensibility::builtin_theories;
use itt_core::types::TheorySpec;

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn theory(name: &str) -> TheorySpec {
    builtin_theories().get(name).expect("built-in theory").spec
}
