use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::subtype::{Saturation, SubProof};
use crate::types::{TheorySpec, Ty};

use super::map::{extend_structurally, ConstantMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obligation {
    /// Source rule flags are among the target's.
    RuleFlags,
    /// The map is total and its images are target types.
    Totality,
    /// A generating inequality of the source, mapped into the target.
    Axiom { source: (Ty, Ty), image: (Ty, Ty) },
    /// `κ(c) ∼ U` exactly when `c ∼ U`.
    TopPreservation { constant: String },
    /// The generated order follows from the axioms and shared rules.
    OrderBySchema,
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obligation::RuleFlags => write!(f, "rule flags included"),
            Obligation::Totality => write!(f, "map total"),
            Obligation::Axiom { source, image } => {
                write!(f, "axiom {} <= {} maps to {} <= {}", source.0, source.1, image.0, image.1)
            }
            Obligation::TopPreservation { constant } => write!(f, "top preserved at {constant}"),
            Obligation::OrderBySchema => write!(f, "order by schema"),
        }
    }
}

impl Serialize for Obligation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A discharged obligation. `proof` is absent for obligations met by
/// construction or by the absence of a derivation on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub obligation: Obligation,
    pub proof: Option<SubProof>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum EmbeddingVerdict {
    Verified { checks: Vec<Check> },
    Failed { obligation: Obligation, detail: String },
    UnknownWithin { obligation: Obligation },
}

impl EmbeddingVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, EmbeddingVerdict::Verified { .. })
    }

    pub fn checks(&self) -> &[Check] {
        match self {
            EmbeddingVerdict::Verified { checks } => checks,
            _ => &[],
        }
    }
}

/// Discharges the embedding conditions with saturations of width `w`.
pub fn verify_embedding(k: &ConstantMap, w: usize) -> Result<EmbeddingVerdict> {
    let (src, tgt) = (&k.source, &k.target);
    if let Some(flag) = src.flags.iter().find(|f| !tgt.has(**f)) {
        return Ok(EmbeddingVerdict::Failed {
            obligation: Obligation::RuleFlags,
            detail: format!("RuleFlagGap: target lacks `{}`", flag.keyword()),
        });
    }
    if let Some(detail) = k.totality_problem() {
        return Ok(EmbeddingVerdict::Failed {
            obligation: Obligation::Totality,
            detail,
        });
    }
    let mut checks = vec![
        Check {
            obligation: Obligation::RuleFlags,
            proof: None,
            note: "source rule flags are a subset of the target's".into(),
        },
        Check {
            obligation: Obligation::Totality,
            proof: None,
            note: "every source constant has a target image".into(),
        },
    ];

    let ineqs = src.generating_inequalities();
    let images: Vec<(Ty, Ty)> = ineqs
        .iter()
        .map(|(a, b)| (extend_structurally(k, a), extend_structurally(k, b)))
        .collect();
    let consts: Vec<Ty> = src.constants.iter().map(|c| Ty::c(c.clone())).collect();
    let mut seeds: Vec<Ty> = images.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    seeds.extend(consts.iter().map(|c| extend_structurally(k, c)));
    let tsat = Saturation::new(tgt, &seeds, w)?;

    for (source, image) in ineqs.into_iter().zip(images) {
        let obligation = Obligation::Axiom { source, image };
        let Obligation::Axiom { image: (a, b), .. } = &obligation else {
            unreachable!()
        };
        match tsat.prove(a, b) {
            Some(p) => checks.push(Check {
                obligation,
                proof: Some(p),
                note: String::new(),
            }),
            None => return Ok(EmbeddingVerdict::UnknownWithin { obligation }),
        }
    }

    let ssat = Saturation::new(src, &consts, w)?;
    for c in &consts {
        let Ty::Const(name) = c else { unreachable!() };
        let image = extend_structurally(k, c);
        let obligation = Obligation::TopPreservation { constant: name.clone() };
        match (ssat.is_top_equiv(c), tsat.prove(&Ty::Top, &image)) {
            (true, Some(p)) => checks.push(Check {
                obligation,
                proof: Some(p),
                note: "both sides equivalent to U".into(),
            }),
            (true, None) | (false, Some(_)) => {
                return Ok(EmbeddingVerdict::UnknownWithin { obligation });
            }
            (false, None) => checks.push(Check {
                obligation,
                proof: None,
                note: "neither side derives U <= it within the universe".into(),
            }),
        }
    }

    checks.push(Check {
        obligation: Obligation::OrderBySchema,
        proof: None,
        note: "rule instances map to rule instances under the homomorphic extension".into(),
    });
    Ok(EmbeddingVerdict::Verified { checks })
}

/// Whether every bundled proof re-checks in `target`.
pub fn recheck(target: &TheorySpec, verdict: &EmbeddingVerdict) -> bool {
    verdict.checks().iter().all(|c| match &c.proof {
        Some(p) => crate::subtype::check_subproof(target, p).is_valid(),
        None => true,
    })
}
