use std::collections::BTreeMap;

use serde::Serialize;

use crate::embed::ConstantMap;
use crate::error::{Error, Result};
use crate::types::{parse_theory, AxiomDecl, RuleFlag, TheorySpec, Ty};

macro_rules! corpus {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/", $name, ".itt")))),*]
    };
}

/// Built-in theory sources, as shipped under `corpus/`.
pub const BUILTIN_SOURCES: &[(&str, &str)] = corpus!(
    "T0", "T0sound", "T1", "Tlow", "Tup", "Tflat", "CDZ", "Park", "T2", "T2p", "T2park", "T3", "T4",
    "Tsharp", "Asharp", "ep", "Ainf3",
);

/// Constant maps tried automatically, as `(source, target, [(c, image)])`.
pub const AUTO_MAPS: &[(&str, &str, &[(&str, &str)])] = &[
    ("T3", "CDZ", &[("c0", "c4"), ("c1", "c4"), ("c2", "c3")]),
    ("Tlow", "CDZ", &[("c", "c3")]),
    ("Tup", "CDZ", &[("c", "c4")]),
    ("Tflat", "CDZ", &[("c", "c3")]),
    ("T2", "T2p", &[("c0", "c0"), ("c1", "c1")]),
    ("Park", "T2park", &[("c", "c0")]),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "citation")]
pub enum KnownStatus {
    Sensible(String),
    NonSensible(String),
    Open,
}

#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub spec: TheorySpec,
    pub status: KnownStatus,
}

#[derive(Debug, Clone)]
pub struct TheoryRegistry {
    pub entries: BTreeMap<String, RegistryEntry>,
}

/// `c, c0 .. c{n-1}` with `c_i ~ c_{i+1} -> c`: a truncation of the
/// infinite chain.
pub fn ainf(n: usize) -> TheorySpec {
    let mut t = TheorySpec::new(format!("Ainf{n}"));
    t.natural = true;
    t.flags.insert(RuleFlag::ArrowTopAxiom);
    t.constants.insert("c".into());
    for i in 0..n {
        t.constants.insert(format!("c{i}"));
    }
    for i in 0..n.saturating_sub(1) {
        t.axioms.push(AxiomDecl::equiv(
            Ty::c(format!("c{i}")),
            Ty::arrow(Ty::c(format!("c{}", i + 1)), Ty::c("c")),
        ));
    }
    t
}

fn ainf_index(name: &str) -> Option<usize> {
    let rest = name.strip_prefix("Ainf")?;
    let digits = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(rest);
    digits.parse().ok().filter(|n| *n >= 1)
}

impl TheoryRegistry {
    /// Looks up a theory by name; `Ainf(n)` and `Ainfn` are generated.
    pub fn get(&self, name: &str) -> Option<RegistryEntry> {
        if let Some(e) = self.entries.get(name) {
            return Some(e.clone());
        }
        ainf_index(name).map(|n| RegistryEntry {
            spec: ainf(n),
            status: KnownStatus::Open,
        })
    }

    /// Status recorded for a theory identical to `t`.
    pub fn status_of(&self, t: &TheorySpec) -> KnownStatus {
        match self.entries.get(&t.name) {
            Some(e) if e.spec.to_itt() == t.to_itt() => e.status.clone(),
            _ => KnownStatus::Open,
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    /// The automatic maps whose theories are both registered.
    pub fn auto_maps(&self) -> Result<Vec<ConstantMap>> {
        AUTO_MAPS
            .iter()
            .map(|(s, t, pairs)| {
                let lookup = |n: &str| {
                    self.entries
                        .get(n)
                        .map(|e| e.spec.clone())
                        .ok_or_else(|| Error::InvalidInput(format!("no registered theory `{n}`")))
                };
                let map = pairs.iter().map(|(c, d)| (c.to_string(), Ty::c(*d))).collect();
                ConstantMap::new(lookup(s)?, lookup(t)?, map)
            })
            .collect()
    }
}

pub fn builtin_theories() -> TheoryRegistry {
    let entries = BUILTIN_SOURCES
        .iter()
        .map(|(name, src)| {
            let spec = parse_theory(src).expect("built-in theories parse");
            let status = match *name {
                "CDZ" => KnownStatus::Sensible("built-in fact: CDZ is a sensible theory".into()),
                "Park" => KnownStatus::NonSensible(
                    "built-in fact: the filter model of Park is isomorphic to Park's model, where Omega is not typed by U alone"
                        .into(),
                ),
                _ => KnownStatus::Open,
            };
            (name.to_string(), RegistryEntry { spec, status })
        })
        .collect();
    TheoryRegistry { entries }
}
