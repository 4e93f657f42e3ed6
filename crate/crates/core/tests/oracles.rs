mod common;

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::{has_path_connecting, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex};
use proptest::prelude::*;

use common::oracle::pos_neg_fails;
use itt_core::polarity::{check_positive_polarity, equivalence_classes, CharacteristicSet, PolarityVerdict};
use itt_core::sensibility::builtin_theories;
use itt_core::types::validate_natural;

/// Classes as strongly connected components of the dependency graph, and
/// the order as reachability between them.
fn scc_poset(a: &CharacteristicSet) -> (BTreeSet<BTreeSet<String>>, BTreeSet<(BTreeSet<String>, BTreeSet<String>)>) {
    let mut g = DiGraph::<String, ()>::new();
    let ix: BTreeMap<String, NodeIndex> = a.axioms.keys().map(|c| (c.clone(), g.add_node(c.clone()))).collect();
    for (c, rhs) in &a.axioms {
        for d in rhs.mentions() {
            g.add_edge(ix[c], ix[d], ());
        }
    }
    let classes: Vec<BTreeSet<String>> = tarjan_scc(&g)
        .into_iter()
        .map(|comp| comp.into_iter().map(|n| g[n].clone()).collect())
        .collect();
    let mut order = BTreeSet::new();
    for lo in &classes {
        for hi in &classes {
            let (l, h) = (ix[lo.first().unwrap()], ix[hi.first().unwrap()]);
            if has_path_connecting(&g, h, l, None) {
                order.insert((lo.clone(), hi.clone()));
            }
        }
    }
    (classes.into_iter().collect(), order)
}

fn agrees_with_oracles(a: &CharacteristicSet) -> Result<(), String> {
    let poset = equivalence_classes(a);
    let classes: BTreeSet<BTreeSet<String>> = poset.classes.iter().cloned().collect();
    let mut order = BTreeSet::new();
    for i in 0..poset.classes.len() {
        for j in 0..poset.classes.len() {
            if poset.le(i, j) {
                order.insert((poset.classes[i].clone(), poset.classes[j].clone()));
            }
        }
    }
    let (want_classes, want_order) = scc_poset(a);
    if classes != want_classes {
        return Err(format!("classes {classes:?} vs {want_classes:?}"));
    }
    if order != want_order {
        return Err(format!("order {order:?} vs {want_order:?}"));
    }
    let fails = matches!(check_positive_polarity(a), PolarityVerdict::Fail(_));
    let depth = 2 * a.axioms.len().max(5);
    if fails != pos_neg_fails(a, depth) {
        return Err(format!("polarity verdict disagrees (fails = {fails})"));
    }
    Ok(())
}

#[test]
fn corpus_sets_agree_with_oracles() {
    let registry = builtin_theories();
    let mut seen = 0;
    for name in registry.names() {
        let t = registry.get(name).unwrap().spec;
        if !t.natural {
            continue;
        }
        let a = validate_natural(&t).unwrap();
        agrees_with_oracles(&a).unwrap_or_else(|e| panic!("{name}: {e}"));
        seen += 1;
    }
    assert!(seen >= 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_sets_agree_with_oracles(a in common::gen::charset(5)) {
        prop_assert!(agrees_with_oracles(&a).is_ok(), "{:?}", agrees_with_oracles(&a));
    }
}
