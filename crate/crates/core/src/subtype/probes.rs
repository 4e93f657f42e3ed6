use std::collections::BTreeSet;

use serde::Serialize;

use super::proof::SubProof;
use super::saturate::Saturation;
use crate::error::{Error, Result};
use crate::par::par_find_first;
use crate::types::{canonicalize, TheorySpec, Ty};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ProbeOutcome<C> {
    CounterexampleFound(C),
    /// Nothing found among the instances of this depth; a bounded result.
    NoCounterexampleUpTo(usize),
}

impl<C> ProbeOutcome<C> {
    pub fn counterexample(&self) -> Option<&C> {
        match self {
            ProbeOutcome::CounterexampleFound(c) => Some(c),
            ProbeOutcome::NoCounterexampleUpTo(_) => None,
        }
    }
}

/// `lhs <= rhs` is derived, `rhs = B -> A` with `A` not derived equal to
/// `U`, and no nonempty subset of the arrows of `lhs` decomposes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaCounterexample {
    pub lhs: Ty,
    pub rhs: Ty,
    pub proof: SubProof,
}

/// `meet(parts) <= B1 -> .. -> Bn -> C` is derived with `C` not derived equal
/// to `U`, and no part is equivalent to `B1 -> .. -> Bn -> D` for a suitable
/// `D` inside the universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetCounterexample {
    pub parts: Vec<Ty>,
    pub rhs: Ty,
    pub arity: usize,
    pub proof: SubProof,
}

/// Types of at most `size` nodes over the theory's constants and `U`.
fn small_types(t: &TheorySpec, size: usize, with_inter: bool) -> Vec<Vec<Ty>> {
    let mut by_size: Vec<Vec<Ty>> = vec![Vec::new(); size + 1];
    if size >= 1 {
        by_size[1].push(Ty::Top);
        by_size[1].extend(t.constants.iter().map(|c| Ty::c(c.clone())));
    }
    for s in 3..=size {
        let mut out = BTreeSet::new();
        for l in 1..s - 1 {
            let r = s - 1 - l;
            for a in &by_size[l] {
                for b in &by_size[r] {
                    out.insert(Ty::arrow(a.clone(), b.clone()));
                    if with_inter {
                        out.insert(Ty::inter(a.clone(), b.clone()));
                    }
                }
            }
        }
        by_size[s] = out.into_iter().collect();
    }
    by_size
}

fn arrow_pool(t: &TheorySpec, depth: usize) -> Vec<Ty> {
    let mut pool: BTreeSet<Ty> = small_types(t, depth, false)
        .into_iter()
        .flatten()
        .filter(|x| matches!(x, Ty::Arrow(..)))
        .map(|x| canonicalize(&x))
        .collect();
    for side in t.axiom_sides() {
        let mut subs = BTreeSet::new();
        canonicalize(&side).subterms(&mut subs);
        pool.extend(subs.into_iter().filter(|x| matches!(x, Ty::Arrow(..))));
    }
    pool.into_iter().collect()
}

/// Subsets of `items` of size `1..=k`, in order of size then position.
fn subsets<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    fn go<T: Clone>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == k {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, k, 0, &mut Vec::new(), &mut out);
    out.sort_by_key(|s| s.len());
    out
}

fn arrow_parts(t: &Ty) -> Option<(&Ty, &Ty)> {
    match t {
        Ty::Arrow(b, a) => Some((b, a)),
        _ => None,
    }
}

/// Checks one instance against a saturation; `None` means the instance is
/// not a counterexample (premises not derived, or a decomposition exists).
pub fn beta_instance_counterexample(sat: &Saturation, lhs: &Ty, rhs: &Ty) -> Option<BetaCounterexample> {
    let (b, a) = arrow_parts(rhs)?;
    if !sat.holds(lhs, rhs) || sat.is_top_equiv(a) {
        return None;
    }
    let canon = canonicalize(lhs);
    let owned: Vec<(Ty, Ty)> = canon
        .conjuncts()
        .into_iter()
        .filter_map(arrow_parts)
        .map(|(x, y)| (x.clone(), y.clone()))
        .collect();
    let decomposed = subsets(&owned, owned.len()).iter().any(|j| {
        let bs = Ty::meet(j.iter().map(|(x, _)| x.clone()));
        let as_ = Ty::meet(j.iter().map(|(_, y)| y.clone()));
        sat.holds(b, &bs) && sat.holds(&as_, a)
    });
    if decomposed {
        return None;
    }
    Some(BetaCounterexample {
        lhs: lhs.clone(),
        rhs: rhs.clone(),
        proof: sat.prove(lhs, rhs).expect("holds"),
    })
}

pub fn beta_soundness_probe(
    t: &TheorySpec,
    depth: usize,
    inter_width: usize,
) -> Result<ProbeOutcome<BetaCounterexample>> {
    if depth == 0 {
        return Err(Error::InvalidInput("probe depth must be at least 1".into()));
    }
    let pool = arrow_pool(t, depth);
    let mut lefts: Vec<Ty> = vec![Ty::Top];
    lefts.extend(subsets(&pool, inter_width.max(1)).into_iter().map(Ty::meet));
    let mut seeds: Vec<Ty> = lefts.clone();
    for l in &lefts {
        let arrows: Vec<(Ty, Ty)> = l
            .conjuncts()
            .into_iter()
            .filter_map(arrow_parts)
            .map(|(x, y)| (x.clone(), y.clone()))
            .collect();
        for j in subsets(&arrows, arrows.len()) {
            seeds.push(Ty::meet(j.iter().map(|(x, _)| x.clone())));
            seeds.push(Ty::meet(j.iter().map(|(_, y)| y.clone())));
        }
    }
    let sat = Saturation::new(t, &seeds, inter_width)?;
    let instances: Vec<(&Ty, &Ty)> = lefts
        .iter()
        .flat_map(|l| pool.iter().map(move |r| (l, r)))
        .collect();
    Ok(
        match par_find_first(&instances, |(l, r)| beta_instance_counterexample(&sat, l, r)) {
            Some((_, c)) => ProbeOutcome::CounterexampleFound(c),
            None => ProbeOutcome::NoCounterexampleUpTo(depth),
        },
    )
}

/// Splits `t` as `B1 -> .. -> Bn -> C`.
fn peel(t: &Ty, n: usize) -> Option<(Vec<Ty>, Ty)> {
    let mut doms = Vec::new();
    let mut cur = t;
    for _ in 0..n {
        let (b, c) = arrow_parts(cur)?;
        doms.push(b.clone());
        cur = c;
    }
    Some((doms, cur.clone()))
}

pub fn set_instance_counterexample(
    sat: &Saturation,
    parts: &[Ty],
    rhs: &Ty,
    arity: usize,
) -> Option<SetCounterexample> {
    let (doms, c) = peel(rhs, arity)?;
    let lhs = Ty::meet(parts.iter().cloned());
    if !sat.holds(&lhs, rhs) || sat.is_top_equiv(&c) {
        return None;
    }
    let u = sat.universe();
    let doms: Vec<Ty> = doms.iter().map(canonicalize).collect();
    let ok = parts.iter().any(|aj| {
        let Some(ja) = u.index_of(aj) else { return false };
        sat.above(ja).iter().any(|&m| {
            if !sat.holds_idx(m, ja) {
                return false;
            }
            match peel(u.get(m), arity) {
                Some((bs, d)) => bs == doms && !sat.is_top_equiv(&d) && sat.holds(&c, &d),
                None => false,
            }
        })
    });
    if ok {
        return None;
    }
    Some(SetCounterexample {
        parts: parts.to_vec(),
        rhs: rhs.clone(),
        arity,
        proof: sat.prove(&lhs, rhs).expect("holds"),
    })
}

pub fn set_condition_probe(
    t: &TheorySpec,
    depth: usize,
    inter_width: usize,
) -> Result<ProbeOutcome<SetCounterexample>> {
    if depth == 0 {
        return Err(Error::InvalidInput("probe depth must be at least 1".into()));
    }
    let mut pool: BTreeSet<Ty> = small_types(t, depth, true)
        .into_iter()
        .flatten()
        .map(|x| canonicalize(&x))
        .collect();
    for side in t.axiom_sides() {
        pool.insert(canonicalize(&side));
    }
    let pool: Vec<Ty> = pool.into_iter().collect();
    let lefts = subsets(&pool, inter_width.max(1));
    let seeds: Vec<Ty> = pool
        .iter()
        .cloned()
        .chain(lefts.iter().map(|l| Ty::meet(l.iter().cloned())))
        .collect();
    let sat = Saturation::new(t, &seeds, inter_width)?;
    let mut instances: Vec<(&Vec<Ty>, &Ty, usize)> = Vec::new();
    for l in &lefts {
        for r in &pool {
            for n in 0..=depth {
                if peel(r, n).is_some() {
                    instances.push((l, r, n));
                }
            }
        }
    }
    Ok(
        match par_find_first(&instances, |(l, r, n)| set_instance_counterexample(&sat, l, r, *n)) {
            Some((_, c)) => ProbeOutcome::CounterexampleFound(c),
            None => ProbeOutcome::NoCounterexampleUpTo(depth),
        },
    )
}
