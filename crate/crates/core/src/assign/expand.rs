use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lambda::{fresh_name, head_step, substitute, Term};
use crate::subtype::{check_subproof, project_nth, SubProof};
use crate::types::{canonicalize, TheorySpec, Ty};

use super::derivation::{check_derivation, Basis, DerivRule, Derivation, Judgment};
use super::infer::{infer_bounded, InferOutcome};

fn require_valid(t: &TheorySpec, d: &Derivation) -> Result<()> {
    match check_derivation(t, d) {
        crate::subtype::CheckResult::Valid => Ok(()),
        crate::subtype::CheckResult::Invalid { node_path, reason } => Err(Error::InvalidInput(format!(
            "derivation invalid at {node_path:?}: {reason}"
        ))),
    }
}

/// The variable an `ArrI` premise adds to the basis.
fn arr_i_var(d: &Derivation) -> &str {
    d.children[0]
        .conclusion
        .basis
        .keys()
        .find(|k| !d.conclusion.basis.contains_key(*k))
        .expect("valid ArrI extends the basis")
}

/// Premise terms of `d` when its conclusion term is `ms`.
fn premise_terms(d: &Derivation, ms: &Term) -> Vec<Term> {
    match (d.rule, ms) {
        (DerivRule::Ax | DerivRule::TopU, _) => Vec::new(),
        (DerivRule::Le, _) => vec![ms.clone()],
        (DerivRule::CapI, _) => vec![ms.clone(), ms.clone()],
        (DerivRule::ArrI, Term::Abs(y, body)) => {
            vec![substitute(body, y, &Term::var(arr_i_var(d)))]
        }
        (DerivRule::ArrE, Term::App(f, a)) => vec![(**f).clone(), (**a).clone()],
        _ => unreachable!("term shape agrees with a valid derivation"),
    }
}

fn is_occurrence(d: &Derivation, ms: &Term, x: &str) -> bool {
    !matches!(d.rule, DerivRule::TopU | DerivRule::Le | DerivRule::CapI) && matches!(ms, Term::Var(v) if v == x)
}

fn strengthen(d: &Derivation, drop: &BTreeSet<String>) -> Derivation {
    d.map_bases(&mut |b: &Basis| b.iter().filter(|(k, _)| !drop.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect())
}

fn collect(d: &Derivation, ms: &Term, x: &str, bound: &mut BTreeSet<String>, out: &mut Vec<Derivation>) {
    if is_occurrence(d, ms, x) {
        out.push(strengthen(d, bound));
        return;
    }
    let added = (d.rule == DerivRule::ArrI).then(|| arr_i_var(d).to_string());
    if let Some(z) = &added {
        bound.insert(z.clone());
    }
    for (c, cm) in d.children.iter().zip(premise_terms(d, ms)) {
        collect(c, &cm, x, bound, out);
    }
    if let Some(z) = added {
        bound.remove(&z);
    }
}

fn rebuild(d: &Derivation, ms: &Term, x: &str, parts: &[Ty], next: &mut usize) -> Derivation {
    let mut basis = d.conclusion.basis.clone();
    basis.insert(x.to_string(), Ty::inter_all(parts.iter().cloned()));
    if is_occurrence(d, ms, x) {
        let i = *next;
        *next += 1;
        let ax = Derivation::ax(basis, x).expect("x was just added");
        return if parts.len() == 1 { ax } else { ax.le(project_nth(parts, i)) };
    }
    let children = d
        .children
        .iter()
        .zip(premise_terms(d, ms))
        .map(|(c, cm)| rebuild(c, &cm, x, parts, next))
        .collect();
    Derivation {
        rule: d.rule,
        conclusion: Judgment::new(basis, ms.clone(), d.conclusion.ty.clone()),
        children,
        sub: d.sub.clone(),
    }
}

/// Turns a derivation of `Γ ⊢ m[x:=n] : A` into one of `Γ ⊢ (\x.m) n : A`.
/// Each typed occurrence of `n` contributes one conjunct to the type of `x`.
pub fn expand_derivation(t: &TheorySpec, d: &Derivation, x: &str, m: &Term, n: &Term) -> Result<Derivation> {
    require_valid(t, d)?;
    if d.conclusion.term != substitute(m, x, n) {
        return Err(Error::InvalidInput("derivation does not type the contractum".into()));
    }
    let mut names = BTreeSet::new();
    d.basis_names(&mut names);
    let (x, m) = if names.contains(x) || n.is_free(x) {
        m.all_names(&mut names);
        n.all_names(&mut names);
        let z = fresh_name(x, &names);
        let m2 = substitute(m, x, &Term::var(z.clone()));
        (z, m2)
    } else {
        (x.to_string(), m.clone())
    };
    let gamma = d.conclusion.basis.clone();

    let mut occurrences = Vec::new();
    collect(d, &m, &x, &mut BTreeSet::new(), &mut occurrences);
    let parts: Vec<Ty> = occurrences.iter().map(|o| o.conclusion.ty.clone()).collect();

    let body = rebuild(d, &m, &x, &parts, &mut 0);
    let fun = Derivation::arr_i(gamma.clone(), Term::abs(x.clone(), m), body);
    let arg = match occurrences.pop() {
        None => Derivation::top(gamma, n.clone()),
        Some(last) => occurrences.into_iter().rev().fold(last, |acc, o| Derivation::cap_i(o, acc)),
    };
    Ok(Derivation::arr_e(fun, arg))
}

/// Adds `y:b` to every basis. `y` must not occur anywhere in `d`.
pub fn weaken(d: &Derivation, y: &str, b: &Ty) -> Result<Derivation> {
    let mut names = BTreeSet::new();
    d.basis_names(&mut names);
    d.conclusion.term.all_names(&mut names);
    if names.contains(y) {
        return Err(Error::PreconditionFailed(format!("`{y}` already occurs in the derivation")));
    }
    Ok(d.map_bases(&mut |g: &Basis| {
        let mut g = g.clone();
        g.insert(y.to_string(), b.clone());
        g
    }))
}

/// Replaces `x:B` by `x:B'` given a proof of `B' <= B`; uses of `x` are
/// re-typed through a `Le` step.
pub fn le_left(t: &TheorySpec, d: &Derivation, x: &str, proof: &SubProof) -> Result<Derivation> {
    let Some(old) = d.conclusion.basis.get(x) else {
        return Err(Error::PreconditionFailed(format!("`{x}` is not in the basis")));
    };
    if canonicalize(&proof.rhs) != canonicalize(old) {
        return Err(Error::PreconditionFailed("proof does not conclude at the basis type".into()));
    }
    if !check_subproof(t, proof).is_valid() {
        return Err(Error::InvalidInput("subtyping proof is invalid".into()));
    }
    Ok(retype(d, x, proof))
}

fn retype(d: &Derivation, x: &str, proof: &SubProof) -> Derivation {
    let mut basis = d.conclusion.basis.clone();
    basis.insert(x.to_string(), proof.lhs.clone());
    if d.rule == DerivRule::Ax && matches!(&d.conclusion.term, Term::Var(v) if v == x) {
        let ax = Derivation::ax(basis.clone(), x).expect("bound");
        return Derivation {
            rule: DerivRule::Le,
            conclusion: Judgment::new(basis, d.conclusion.term.clone(), d.conclusion.ty.clone()),
            children: vec![ax],
            sub: Some(proof.clone()),
        };
    }
    Derivation {
        rule: d.rule,
        conclusion: Judgment::new(basis, d.conclusion.term.clone(), d.conclusion.ty.clone()),
        children: d.children.iter().map(|c| retype(c, x, proof)).collect(),
        sub: d.sub.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionOutcome {
    Preserved(Derivation),
    NotFoundWithinFuel,
}

/// Contracts the head redex of the typed term and searches for the same
/// judgment on the reduct.
pub fn subject_reduction_probe(t: &TheorySpec, d: &Derivation, fuel: usize, w: usize) -> Result<ReductionOutcome> {
    require_valid(t, d)?;
    let j = &d.conclusion;
    let reduct = head_step(&j.term).ok_or_else(|| Error::InvalidInput("term has no head redex".into()))?;
    Ok(match infer_bounded(t, &j.basis, &reduct, &j.ty, fuel, w)? {
        InferOutcome::Found(d) => ReductionOutcome::Preserved(d),
        InferOutcome::NotFoundWithinFuel => ReductionOutcome::NotFoundWithinFuel,
    })
}
