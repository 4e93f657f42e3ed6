use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lambda::Term;
use crate::par::par_map;
use crate::subtype::Saturation;
use crate::types::{TheorySpec, Ty};

use super::derivation::Basis;
use super::infer::{infer_with, InferOutcome};

/// A finitely generated filter, seen through a saturated universe.
#[derive(Debug, Clone)]
pub struct FilterRep {
    sat: Arc<Saturation>,
    generators: BTreeSet<Ty>,
    members: BTreeSet<u32>,
}

impl FilterRep {
    pub fn saturation(&self) -> &Arc<Saturation> {
        &self.sat
    }

    pub fn generators(&self) -> &BTreeSet<Ty> {
        &self.generators
    }

    pub fn contains(&self, a: &Ty) -> bool {
        self.sat
            .universe()
            .index_of(a)
            .is_some_and(|i| self.members.contains(&i))
    }

    /// Universe members in the filter, in universe order.
    pub fn members(&self) -> Vec<Ty> {
        self.members.iter().map(|&i| self.sat.universe().get(i).clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &FilterRep) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Least members: those with no strictly smaller member.
    pub fn minimal_members(&self) -> Vec<Ty> {
        self.members
            .iter()
            .filter(|&&i| {
                !self
                    .members
                    .iter()
                    .any(|&j| j != i && self.sat.holds_idx(j, i) && !self.sat.holds_idx(i, j))
            })
            .map(|&i| self.sat.universe().get(i).clone())
            .collect()
    }
}

impl PartialEq for FilterRep {
    fn eq(&self, other: &FilterRep) -> bool {
        Arc::ptr_eq(&self.sat, &other.sat) && self.members == other.members
    }
}

/// `↑xs` within the universe of `sat`: upward closed and closed under those
/// intersections the universe contains.
pub fn filter_up(sat: &Arc<Saturation>, xs: &BTreeSet<Ty>) -> Result<FilterRep> {
    let u = sat.universe();
    let mut gens = BTreeSet::new();
    for x in xs {
        let i = u
            .index_of(x)
            .ok_or_else(|| Error::InvalidInput(format!("{x} lies outside the universe")))?;
        gens.insert(i);
    }
    let top = sat.top_index();
    gens.retain(|&g| !sat.holds_idx(top, g));
    let kept: BTreeSet<u32> = gens
        .iter()
        .copied()
        .filter(|&g| {
            !gens
                .iter()
                .any(|&h| h != g && sat.holds_idx(h, g) && (!sat.holds_idx(g, h) || h < g))
        })
        .collect();

    let mut members = BTreeSet::new();
    for &g in kept.iter().chain([&top]) {
        members.extend(sat.above(g).iter().copied());
    }
    // intersections listed smallest first, so nested meets enter in order
    let mut inters: Vec<(u32, u32, u32)> = u
        .members()
        .iter()
        .enumerate()
        .filter_map(|(i, ty)| match ty {
            Ty::Inter(l, r) => Some((i as u32, u.index_of_canonical(l)?, u.index_of_canonical(r)?)),
            _ => None,
        })
        .collect();
    inters.sort_by_key(|&(i, _, _)| u.get(i).size());
    loop {
        let mut changed = false;
        for &(i, l, r) in &inters {
            if !members.contains(&i) && members.contains(&l) && members.contains(&r) {
                members.extend(sat.above(i).iter().copied());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(FilterRep {
        sat: Arc::clone(sat),
        generators: kept.into_iter().map(|i| u.get(i).clone()).collect(),
        members,
    })
}

#[derive(Debug, Clone)]
pub struct FilterApply {
    pub result: FilterRep,
    /// The raw image was already a filter, so no closure was needed.
    pub raw_was_filter: bool,
}

/// `f · g = {A | ∃B ∈ g. B -> A ∈ f}`, closed upward.
pub fn filter_apply(f: &FilterRep, g: &FilterRep) -> Result<FilterApply> {
    if !Arc::ptr_eq(&f.sat, &g.sat) {
        return Err(Error::InvalidInput("filters live in different universes".into()));
    }
    let u = f.sat.universe();
    let mut raw = BTreeSet::new();
    for &i in &f.members {
        if let Ty::Arrow(d, c) = u.get(i) {
            let di = u.index_of_canonical(d).expect("subterm closed");
            if g.members.contains(&di) {
                raw.insert(u.index_of_canonical(c).expect("subterm closed"));
            }
        }
    }
    let raw_tys: BTreeSet<Ty> = raw.iter().map(|&i| u.get(i).clone()).collect();
    let result = filter_up(&f.sat, &raw_tys)?;
    let raw_was_filter = result.members == raw;
    Ok(FilterApply { result, raw_was_filter })
}

// Basis choices per variable, capped to keep the product small.
const MAX_BASES: usize = 64;

/// Types `m` may receive under environments drawn from `env`, closed to a
/// filter. Every type found directly is backed by a checked derivation.
pub fn interpret_term_bounded(
    t: &TheorySpec,
    m: &Term,
    env: &BTreeMap<String, FilterRep>,
    fuel: usize,
    w: usize,
) -> Result<FilterRep> {
    for x in m.free_vars() {
        if !env.contains_key(&x) {
            return Err(Error::InvalidInput(format!("environment misses `{x}`")));
        }
    }
    let sat = match env.values().next() {
        Some(f) => Arc::clone(&f.sat),
        None => Arc::new(Saturation::new(t, &[], w)?),
    };
    if env.values().any(|f| !Arc::ptr_eq(&f.sat, &sat)) {
        return Err(Error::InvalidInput("environment filters live in different universes".into()));
    }
    let mut bases = vec![Basis::new()];
    for x in m.free_vars() {
        let choices = env[&x].minimal_members();
        let mut next = Vec::new();
        'outer: for b in &bases {
            for c in &choices {
                if next.len() == MAX_BASES {
                    break 'outer;
                }
                let mut b = b.clone();
                b.insert(x.clone(), c.clone());
                next.push(b);
            }
        }
        bases = next;
    }
    let targets: Vec<Ty> = sat.universe().members().to_vec();
    let found = par_map(&targets, |a| {
        bases
            .iter()
            .any(|g| matches!(infer_with(&sat, g, m, a, fuel), Ok(InferOutcome::Found(_))))
    });
    let typed: BTreeSet<Ty> = targets
        .into_iter()
        .zip(found)
        .filter_map(|(a, ok)| ok.then_some(a))
        .collect();
    filter_up(&sat, &typed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::named;
    use crate::types::{parse_theory, parse_ty};

    fn p(s: &str) -> Ty {
        parse_ty(s).unwrap()
    }

    fn sat(src: &str, seeds: &[&str]) -> Arc<Saturation> {
        let t = parse_theory(src).unwrap();
        let seeds: Vec<Ty> = seeds.iter().map(|s| p(s)).collect();
        Arc::new(Saturation::new(&t, &seeds, 2).unwrap())
    }

    #[test]
    fn bottom_filter_is_top_class() {
        let s = sat("constants a", &["a -> a"]);
        let f = filter_up(&s, &BTreeSet::new()).unwrap();
        for ty in s.universe().members() {
            assert_eq!(f.contains(ty), s.is_top_equiv(ty), "{ty}");
        }
    }

    #[test]
    fn principal_filters() {
        let s = sat("constants a b", &["a & b"]);
        let fa = filter_up(&s, &BTreeSet::from([p("a")])).unwrap();
        assert_eq!(fa.members(), vec![Ty::Top, p("a")]);
        let fab = filter_up(&s, &BTreeSet::from([p("a"), p("b")])).unwrap();
        assert!(fab.contains(&p("a & b")));
        let redundant = filter_up(&s, &BTreeSet::from([p("a"), p("a & b")])).unwrap();
        assert_eq!(redundant.generators(), &BTreeSet::from([p("a & b")]));
    }

    #[test]
    fn application_of_principal_filters() {
        let s = sat("constants a b", &["b -> a"]);
        let f = filter_up(&s, &BTreeSet::from([p("b -> a")])).unwrap();
        let g = filter_up(&s, &BTreeSet::from([p("b")])).unwrap();
        let fg = filter_apply(&f, &g).unwrap();
        assert!(fg.result.contains(&p("a")));
    }

    #[test]
    fn omega_in_park_filter() {
        let t = parse_theory("constants c\nflags arrow-U\naxiom c ~ c -> c\nnatural").unwrap();
        let f = interpret_term_bounded(&t, &named::big_omega(), &BTreeMap::new(), 200, 2).unwrap();
        assert!(f.contains(&p("c")));
    }

    #[test]
    fn variable_interpretation() {
        let s = sat("constants a b", &["a"]);
        let t = s.theory().clone();
        let env = BTreeMap::from([("x".to_string(), filter_up(&s, &BTreeSet::from([p("a")])).unwrap())]);
        let f = interpret_term_bounded(&t, &Term::var("x"), &env, 20, 2).unwrap();
        assert!(f.contains(&p("a")));
        assert!(interpret_term_bounded(&t, &Term::var("y"), &env, 20, 2).is_err());
    }
}
