use std::collections::BTreeSet;

use serde::Serialize;

use crate::assign::{infer_with, Basis, InferOutcome};
use crate::embed::{HeadTrace, UnsolvableWitness};
use crate::error::Result;
use crate::lambda::{named, Term};
use crate::par::par_find_first;
use crate::subtype::Saturation;
use crate::types::{canonicalize, TheorySpec, Ty};

/// The fixed pool of terms without head normal form, with display names.
pub fn default_pool() -> Vec<(String, Term)> {
    vec![
        ("Omega".into(), named::big_omega()),
        ("omega3 omega3".into(), Term::app(named::omega3(), named::omega3())),
        ("Omega I".into(), Term::app(named::big_omega(), named::identity())),
        ("omega2 omega2".into(), Term::app(named::omega2(), named::omega2())),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result")]
pub enum UnsolvableProbe {
    Witness { name: String, witness: UnsolvableWitness },
    NoneFound { pairs_tried: usize },
}

/// Types tried against each pool term: the constants, then the axiom sides,
/// skipping anything derivably equivalent to `U`.
pub fn probe_targets(t: &TheorySpec, sat: &Saturation) -> Vec<Ty> {
    let mut seen = BTreeSet::new();
    t.constants
        .iter()
        .map(|c| Ty::c(c.clone()))
        .chain(t.axiom_sides())
        .filter(|ty| !sat.is_top_equiv(ty))
        .filter(|ty| seen.insert(canonicalize(ty)))
        .collect()
}

/// Looks for a pool term whose head reduction exhausts `fuel` but which
/// nevertheless receives a type other than `U`.
pub fn probe_unsolvable_typing(
    t: &TheorySpec,
    fuel: usize,
    w: usize,
    extra: &[(String, Term)],
) -> Result<UnsolvableProbe> {
    let seeds: Vec<Ty> = t.constants.iter().map(|c| Ty::c(c.clone())).collect();
    let sat = Saturation::new(t, &seeds, w)?;
    let targets = probe_targets(t, &sat);
    let mut pool = default_pool();
    pool.extend(extra.iter().cloned());
    let traced: Vec<(String, Term, HeadTrace)> = pool
        .into_iter()
        .filter_map(|(n, m)| HeadTrace::record(&m, fuel).map(|h| (n, m, h)))
        .collect();
    let pairs: Vec<(usize, &Ty)> = (0..traced.len())
        .flat_map(|i| targets.iter().map(move |ty| (i, ty)))
        .collect();
    let hit = par_find_first(&pairs, |&(i, ty)| {
        match infer_with(&sat, &Basis::new(), &traced[i].1, ty, fuel) {
            Ok(InferOutcome::Found(d)) => Some(d),
            _ => None,
        }
    });
    Ok(match hit {
        Some((k, derivation)) => {
            let (i, ty) = pairs[k];
            let (name, term, head_trace) = traced[i].clone();
            UnsolvableProbe::Witness {
                name,
                witness: UnsolvableWitness {
                    term,
                    ty: ty.clone(),
                    derivation,
                    head_trace,
                },
            }
        }
        None => UnsolvableProbe::NoneFound { pairs_tried: pairs.len() },
    })
}
