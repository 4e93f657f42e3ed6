use std::collections::{BTreeMap, BTreeSet};

use super::{Ty, TheorySpec};
use crate::error::{Error, Result};
use crate::polarity::{CharacteristicSet, Rhs};

/// Name standing for `U` inside a characteristic set.
pub const TOP_NAME: &str = "U";

/// Brings the defining axioms of a natural theory into restricted form.
///
/// Renamings `c ~ c'` are removed by substitution (a cycle of renamings
/// collapses onto its least name), nested right-hand sides are split with
/// fresh `$k` constants, and constants with no axiom get `c ~ c`.
pub fn validate_natural(t: &TheorySpec) -> Result<CharacteristicSet> {
    if !t.natural {
        return Err(Error::NaturalShapeViolation(format!(
            "theory `{}` is not declared natural",
            t.name
        )));
    }
    t.validate()?;

    let mut defs: BTreeMap<String, Ty> = BTreeMap::new();
    for ax in &t.axioms {
        if let Ty::Const(c) = &ax.lhs {
            defs.insert(c.clone(), ax.rhs.clone());
        }
    }

    // renaming graph: c -> c' for axioms c ~ c' (c' may be U)
    let atom_name = |ty: &Ty| match ty {
        Ty::Const(d) => Some(d.clone()),
        Ty::Top => Some(TOP_NAME.to_string()),
        _ => None,
    };
    let mut step: BTreeMap<String, String> = BTreeMap::new();
    for (c, rhs) in &defs {
        if let Some(d) = atom_name(rhs) {
            if d != *c {
                step.insert(c.clone(), d);
            }
        }
    }
    let mut rep: BTreeMap<String, String> = BTreeMap::new();
    let mut cycle_reps: BTreeSet<String> = BTreeSet::new();
    for c in step.keys() {
        let mut path = vec![c.clone()];
        let mut cur = c.clone();
        let r = loop {
            match step.get(&cur) {
                None => break cur,
                Some(next) => {
                    if let Some(i) = path.iter().position(|p| p == next) {
                        let least = path[i..].iter().min().cloned().expect("nonempty cycle");
                        cycle_reps.insert(least.clone());
                        break least;
                    }
                    path.push(next.clone());
                    cur = next.clone();
                }
            }
        };
        rep.insert(c.clone(), r);
    }
    let renamings: BTreeMap<String, String> = rep
        .iter()
        .filter(|(c, r)| c != r)
        .map(|(c, r)| (c.clone(), r.clone()))
        .collect();
    let resolve = |n: String| renamings.get(&n).cloned().unwrap_or(n);

    let mut out = CharacteristicSet::default();
    let mut counter = 0usize;
    for ax in &t.axioms {
        let Ty::Const(c) = &ax.lhs else { continue };
        if renamings.contains_key(c) {
            continue;
        }
        let rhs = if cycle_reps.contains(c) || atom_name(&ax.rhs).as_deref() == Some(c.as_str()) {
            Rhs::SelfC
        } else {
            split(&ax.rhs, &mut counter, &mut out, &resolve)
        };
        out.axioms.insert(c.clone(), rhs);
    }
    for c in &t.constants {
        if !renamings.contains_key(c) {
            out.axioms.entry(c.clone()).or_insert(Rhs::SelfC);
        }
    }
    out.renamings = renamings;
    Ok(out.completion())
}

/// Restricted form of a compound right-hand side.
fn split(
    ty: &Ty,
    counter: &mut usize,
    out: &mut CharacteristicSet,
    resolve: &impl Fn(String) -> String,
) -> Rhs {
    let (a, b, arrow) = match ty {
        Ty::Arrow(a, b) => (a, b, true),
        Ty::Inter(a, b) => (a, b, false),
        _ => unreachable!("atomic right-hand sides are renamings or identities"),
    };
    let l = name_of(a, counter, out, resolve);
    let r = name_of(b, counter, out, resolve);
    if arrow {
        Rhs::ArrowC(l, r)
    } else {
        Rhs::InterC(l, r)
    }
}

fn name_of(
    ty: &Ty,
    counter: &mut usize,
    out: &mut CharacteristicSet,
    resolve: &impl Fn(String) -> String,
) -> String {
    match ty {
        Ty::Top => TOP_NAME.to_string(),
        Ty::Const(c) => resolve(c.clone()),
        _ => {
            *counter += 1;
            let name = format!("${counter}");
            out.fresh.insert(name.clone(), ty.clone());
            let rhs = split(ty, counter, out, resolve);
            out.axioms.insert(name.clone(), rhs);
            name
        }
    }
}
