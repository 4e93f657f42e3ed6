use std::collections::BTreeMap;

use serde::Serialize;

use crate::assign::{check_derivation, Derivation};
use crate::error::{Error, Result};
use crate::lambda::{head_reduce, HeadOutcome, Term};
use crate::types::{TheorySpec, Ty};

use super::map::ConstantMap;
use super::verify::{recheck, verify_embedding, Check, EmbeddingVerdict};

/// Head reduction of a term ran out of fuel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeadTrace {
    pub fuel: usize,
    pub last: Term,
}

impl HeadTrace {
    /// `None` when the term reaches a head normal form within `fuel`.
    pub fn record(m: &Term, fuel: usize) -> Option<HeadTrace> {
        match head_reduce(m, fuel) {
            HeadOutcome::FuelExhausted { last } => Some(HeadTrace { fuel, last }),
            HeadOutcome::Reached { .. } => None,
        }
    }

    pub fn replays(&self, m: &Term) -> bool {
        HeadTrace::record(m, self.fuel).as_ref() == Some(self)
    }
}

/// A type other than `U` given to a term with no head normal form in sight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnsolvableWitness {
    pub term: Term,
    pub ty: Ty,
    pub derivation: Derivation,
    pub head_trace: HeadTrace,
}

impl UnsolvableWitness {
    pub fn revalidate(&self, t: &TheorySpec) -> bool {
        self.derivation.conclusion.basis.is_empty()
            && self.derivation.conclusion.term == self.term
            && self.derivation.conclusion.ty == self.ty
            && check_derivation(t, &self.derivation).is_valid()
            && self.head_trace.replays(&self.term)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum SensibleEvidence {
    RegistryFact { citation: String },
    PolarityPass { caveats: Vec<String> },
    EmbeddingInto { target: String, certificate: Box<TransferCertificate> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum NonSensibleEvidence {
    RegistryFact { citation: String },
    UnsolvableTyped(UnsolvableWitness),
    EmbeddingFrom { source: String, certificate: Box<TransferCertificate> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    Sensible,
    NonSensible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Evidence {
    Sensible(SensibleEvidence),
    NonSensible(NonSensibleEvidence),
}

/// An embedding together with the evidence it transports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferCertificate {
    pub conclusion: Conclusion,
    /// Theory the conclusion is about.
    pub subject: String,
    pub source: String,
    pub target: String,
    pub map: BTreeMap<String, Ty>,
    pub checks: Vec<Check>,
    pub evidence: Evidence,
}

impl TransferCertificate {
    /// Re-checks the embedding proofs in the target and any derivation
    /// carried as evidence.
    pub fn revalidate(&self, source: &TheorySpec, target: &TheorySpec) -> bool {
        let proofs_ok = recheck(target, &EmbeddingVerdict::Verified { checks: self.checks.clone() });
        let evidence_ok = match &self.evidence {
            Evidence::NonSensible(NonSensibleEvidence::UnsolvableTyped(w)) => w.revalidate(source),
            _ => true,
        };
        proofs_ok && evidence_ok
    }
}

fn verified_checks(k: &ConstantMap, w: usize) -> Result<Vec<Check>> {
    match verify_embedding(k, w)? {
        EmbeddingVerdict::Verified { checks } => Ok(checks),
        EmbeddingVerdict::Failed { obligation, detail } => Err(Error::PreconditionFailed(format!(
            "embedding fails at {obligation}: {detail}"
        ))),
        EmbeddingVerdict::UnknownWithin { obligation } => Err(Error::PreconditionFailed(format!(
            "embedding obligation undecided within the universe: {obligation}"
        ))),
    }
}

/// The source is sensible when it embeds in a sensible target.
pub fn transfer_sensible(k: &ConstantMap, w: usize, target_evidence: SensibleEvidence) -> Result<TransferCertificate> {
    let checks = verified_checks(k, w)?;
    Ok(TransferCertificate {
        conclusion: Conclusion::Sensible,
        subject: k.source.name.clone(),
        source: k.source.name.clone(),
        target: k.target.name.clone(),
        map: k.map.clone(),
        checks,
        evidence: Evidence::Sensible(target_evidence),
    })
}

/// The target is non-sensible when a non-sensible source embeds in it.
pub fn transfer_nonsensible(
    k: &ConstantMap,
    w: usize,
    source_evidence: NonSensibleEvidence,
) -> Result<TransferCertificate> {
    if let NonSensibleEvidence::UnsolvableTyped(wit) = &source_evidence {
        if !wit.revalidate(&k.source) {
            return Err(Error::PreconditionFailed("source witness does not re-validate".into()));
        }
    }
    let checks = verified_checks(k, w)?;
    Ok(TransferCertificate {
        conclusion: Conclusion::NonSensible,
        subject: k.target.name.clone(),
        source: k.source.name.clone(),
        target: k.target.name.clone(),
        map: k.map.clone(),
        checks,
        evidence: Evidence::NonSensible(source_evidence),
    })
}
