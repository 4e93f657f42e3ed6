use std::collections::BTreeSet;

use proptest::prelude::*;

use itt_core::lambda::Term;
use itt_core::polarity::{CharacteristicSet, Rhs};
use itt_core::types::{AxiomDecl, RuleFlag, TheorySpec, Ty};

pub fn term(vars: &'static [&'static str], depth: u32) -> BoxedStrategy<Term> {
    let leaf = prop::sample::select(vars).prop_map(Term::var);
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        prop_oneof![
            (prop::sample::select(vars), inner.clone()).prop_map(|(x, b)| Term::abs(x, b)),
            (inner.clone(), inner).prop_map(|(f, a)| Term::app(f, a)),
        ]
    })
    .boxed()
}

pub fn ty(consts: &[&str], depth: u32) -> BoxedStrategy<Ty> {
    ty_over(consts.iter().map(|c| c.to_string()).collect(), depth)
}

pub fn ty_over(names: Vec<String>, depth: u32) -> BoxedStrategy<Ty> {
    let leaf = prop_oneof![
        1 => Just(Ty::Top),
        6 => prop::sample::select(names).prop_map(Ty::c),
    ];
    leaf.prop_recursive(depth, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ty::arrow(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Ty::inter(a, b)),
        ]
    })
    .boxed()
}

pub fn theory(consts: &'static [&'static str], max_axioms: usize, depth: u32) -> BoxedStrategy<TheorySpec> {
    let flags = prop::collection::btree_set(prop::sample::select(RuleFlag::ALL.to_vec()), 0..=4);
    let axioms = prop::collection::vec((ty(consts, depth), ty(consts, depth), any::<bool>()), 0..=max_axioms);
    (flags, axioms)
        .prop_map(move |(flags, axioms)| {
            let mut t = TheorySpec::new("random");
            t.constants = consts.iter().map(|c| c.to_string()).collect();
            t.flags = flags;
            t.axioms = axioms
                .into_iter()
                .map(|(l, r, eq)| if eq { AxiomDecl::equiv(l, r) } else { AxiomDecl::le(l, r) })
                .collect();
            t
        })
        .boxed()
}

/// A complete characteristic set over `c0 .. c{n-1}`.
pub fn charset(n: usize) -> BoxedStrategy<CharacteristicSet> {
    let name = move |i: usize| format!("c{i}");
    let rhs = prop_oneof![
        2 => Just(None),
        3 => (0..n, 0..n).prop_map(move |(a, b)| Some(Rhs::ArrowC(name(a), name(b)))),
        2 => (0..n, 0..n).prop_map(move |(a, b)| Some(Rhs::InterC(name(a), name(b)))),
    ];
    prop::collection::vec(rhs, n)
        .prop_map(move |rs| {
            let axioms = rs
                .into_iter()
                .enumerate()
                .filter_map(|(i, r)| r.map(|r| (name(i), r)));
            CharacteristicSet::from_axioms(axioms).completion()
        })
        .boxed()
}

/// Index subsets `small ⊆ large` of `0..n`.
pub fn nested_subsets(n: usize) -> BoxedStrategy<(BTreeSet<usize>, BTreeSet<usize>)> {
    (
        prop::collection::btree_set(0..n, 0..=3),
        prop::collection::btree_set(0..n, 0..=3),
    )
        .prop_map(|(a, b)| {
            let large = a.union(&b).copied().collect();
            (a, large)
        })
        .boxed()
}
