use serde::Serialize;

use crate::embed::{
    transfer_nonsensible, transfer_sensible, verify_embedding, ConstantMap, EmbeddingVerdict, NonSensibleEvidence,
    SensibleEvidence,
};
use crate::lambda::Term;
use crate::polarity::analyze;
use crate::types::TheorySpec;

use super::probe::{probe_unsolvable_typing, UnsolvableProbe};
use super::registry::{KnownStatus, TheoryRegistry};

/// Search limits shared by every stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub fuel: usize,
    pub width: usize,
    pub depth: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            fuel: 10_000,
            width: 2,
            depth: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub stage: String,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "evidence")]
pub enum SensibilityVerdict {
    Sensible(SensibleEvidence),
    NonSensible(NonSensibleEvidence),
    Unknown { tried: Vec<Attempt> },
}

impl SensibilityVerdict {
    /// `Sensible/PolarityPass`, `Unknown`, ...
    pub fn summary(&self) -> String {
        let kind = |e: &serde_json::Value| e["kind"].as_str().unwrap_or("?").to_string();
        match self {
            SensibilityVerdict::Sensible(e) => {
                format!("Sensible/{}", kind(&serde_json::to_value(e).expect("serialisable")))
            }
            SensibilityVerdict::NonSensible(e) => {
                format!("NonSensible/{}", kind(&serde_json::to_value(e).expect("serialisable")))
            }
            SensibilityVerdict::Unknown { .. } => "Unknown".into(),
        }
    }
}

/// Inputs besides the theory itself.
#[derive(Debug, Clone)]
pub struct PipelineContext<'a> {
    pub registry: &'a TheoryRegistry,
    /// User-supplied maps, tried before the automatic ones.
    pub maps: &'a [ConstantMap],
    pub extra_pool: &'a [(String, Term)],
}

fn same_theory(a: &TheorySpec, b: &TheorySpec) -> bool {
    a.name == b.name && a.to_itt() == b.to_itt()
}

/// Evidence that `t` is sensible without leaving `t`: a recorded fact or a
/// passing polarity check.
fn direct_sensible(t: &TheorySpec, registry: &TheoryRegistry) -> Option<SensibleEvidence> {
    if t.natural {
        if let Ok(report) = analyze(t) {
            if report.passes() {
                return Some(SensibleEvidence::PolarityPass {
                    caveats: report.caveats,
                });
            }
        }
    }
    match registry.status_of(t) {
        KnownStatus::Sensible(citation) => Some(SensibleEvidence::RegistryFact { citation }),
        _ => None,
    }
}

fn direct_nonsensible(t: &TheorySpec, ctx: &PipelineContext, b: Budget) -> Option<NonSensibleEvidence> {
    if let Ok(UnsolvableProbe::Witness { witness, .. }) = probe_unsolvable_typing(t, b.fuel, b.width, ctx.extra_pool) {
        return Some(NonSensibleEvidence::UnsolvableTyped(witness));
    }
    match ctx.registry.status_of(t) {
        KnownStatus::NonSensible(citation) => Some(NonSensibleEvidence::RegistryFact { citation }),
        _ => None,
    }
}

fn describe(v: &EmbeddingVerdict) -> String {
    match v {
        EmbeddingVerdict::Verified { .. } => "verified".into(),
        EmbeddingVerdict::Failed { obligation, detail } => format!("failed at {obligation}: {detail}"),
        EmbeddingVerdict::UnknownWithin { obligation } => format!("undecided: {obligation}"),
    }
}

/// Runs the stages in order: polarity, recorded facts, embeddings into
/// sensible targets, embeddings from non-sensible sources, the unsolvable
/// probe, and finally recorded non-sensibility.
pub fn verdict(t: &TheorySpec, budget: Budget, ctx: &PipelineContext) -> SensibilityVerdict {
    let mut tried = Vec::new();
    let mut log = |stage: &str, outcome: String| {
        tried.push(Attempt {
            stage: stage.into(),
            outcome,
        })
    };

    if t.natural {
        match analyze(t) {
            Ok(r) if r.passes() => {
                return SensibilityVerdict::Sensible(SensibleEvidence::PolarityPass { caveats: r.caveats });
            }
            Ok(_) => log("polarity", "fails".into()),
            Err(e) => log("polarity", format!("error: {e}")),
        }
    } else {
        log("polarity", "skipped: theory is not natural".into());
    }

    if let KnownStatus::Sensible(citation) = ctx.registry.status_of(t) {
        return SensibilityVerdict::Sensible(SensibleEvidence::RegistryFact { citation });
    }

    let auto = ctx.registry.auto_maps().unwrap_or_default();
    let candidates: Vec<&ConstantMap> = ctx.maps.iter().chain(auto.iter()).collect();

    for k in candidates.iter().filter(|k| same_theory(&k.source, t) && k.target.name != t.name) {
        let stage = format!("embedding into {}", k.target.name);
        let Some(evidence) = direct_sensible(&k.target, ctx.registry) else {
            log(&stage, "target not known sensible".into());
            continue;
        };
        match verify_embedding(k, budget.width) {
            Ok(v @ EmbeddingVerdict::Verified { .. }) => match transfer_sensible(k, budget.width, evidence) {
                Ok(cert) => {
                    return SensibilityVerdict::Sensible(SensibleEvidence::EmbeddingInto {
                        target: k.target.name.clone(),
                        certificate: Box::new(cert),
                    });
                }
                Err(e) => log(&stage, format!("{}; transfer error: {e}", describe(&v))),
            },
            Ok(v) => log(&stage, describe(&v)),
            Err(e) => log(&stage, format!("error: {e}")),
        }
    }

    for k in candidates.iter().filter(|k| same_theory(&k.target, t) && k.source.name != t.name) {
        let stage = format!("embedding from {}", k.source.name);
        let Some(evidence) = direct_nonsensible(&k.source, ctx, budget) else {
            log(&stage, "source not known non-sensible".into());
            continue;
        };
        match transfer_nonsensible(k, budget.width, evidence) {
            Ok(cert) => {
                return SensibilityVerdict::NonSensible(NonSensibleEvidence::EmbeddingFrom {
                    source: k.source.name.clone(),
                    certificate: Box::new(cert),
                });
            }
            Err(e) => log(&stage, e.to_string()),
        }
    }

    match probe_unsolvable_typing(t, budget.fuel, budget.width, ctx.extra_pool) {
        Ok(UnsolvableProbe::Witness { witness, .. }) => {
            return SensibilityVerdict::NonSensible(NonSensibleEvidence::UnsolvableTyped(witness));
        }
        Ok(UnsolvableProbe::NoneFound { pairs_tried }) => log(
            "unsolvable probe",
            format!("no typing found for {pairs_tried} term/type pairs at fuel {}", budget.fuel),
        ),
        Err(e) => log("unsolvable probe", format!("error: {e}")),
    }

    if let KnownStatus::NonSensible(citation) = ctx.registry.status_of(t) {
        return SensibilityVerdict::NonSensible(NonSensibleEvidence::RegistryFact { citation });
    }
    SensibilityVerdict::Unknown { tried }
}

/// Verdicts for every registered theory, computed in parallel.
pub fn corpus_verdicts(registry: &TheoryRegistry, budget: Budget) -> Vec<(String, SensibilityVerdict)> {
    let names: Vec<String> = registry.names().cloned().collect();
    let ctx = PipelineContext {
        registry,
        maps: &[],
        extra_pool: &[],
    };
    let verdicts = crate::par::par_map(&names, |n| {
        let spec = registry.get(n).expect("registered").spec;
        verdict(&spec, budget, &ctx)
    });
    names.into_iter().zip(verdicts).collect()
}

/// Re-checks the evidence behind a verdict about `t`. `lookup` resolves the
/// other theory named in an embedding certificate.
pub fn revalidate_verdict(
    t: &TheorySpec,
    v: &SensibilityVerdict,
    registry: &TheoryRegistry,
    lookup: &dyn Fn(&str) -> Option<TheorySpec>,
) -> bool {
    match v {
        SensibilityVerdict::Sensible(SensibleEvidence::PolarityPass { .. }) => {
            t.natural && analyze(t).is_ok_and(|r| r.passes())
        }
        SensibilityVerdict::Sensible(SensibleEvidence::RegistryFact { .. }) => {
            matches!(registry.status_of(t), KnownStatus::Sensible(_))
        }
        SensibilityVerdict::Sensible(SensibleEvidence::EmbeddingInto { certificate, .. }) => {
            lookup(&certificate.target).is_some_and(|target| certificate.revalidate(t, &target))
        }
        SensibilityVerdict::NonSensible(NonSensibleEvidence::UnsolvableTyped(w)) => w.revalidate(t),
        SensibilityVerdict::NonSensible(NonSensibleEvidence::RegistryFact { .. }) => {
            matches!(registry.status_of(t), KnownStatus::NonSensible(_))
        }
        SensibilityVerdict::NonSensible(NonSensibleEvidence::EmbeddingFrom { certificate, .. }) => {
            lookup(&certificate.source).is_some_and(|source| certificate.revalidate(&source, t))
        }
        SensibilityVerdict::Unknown { .. } => true,
    }
}
