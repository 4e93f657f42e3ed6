mod common;

use std::collections::BTreeMap;

use common::repo_root;
use itt_core::par::set_parallel;
use itt_core::sensibility::{builtin_theories, corpus_verdicts, revalidate_verdict, Budget, SensibilityVerdict};

fn golden() -> BTreeMap<String, String> {
    let src = std::fs::read_to_string(repo_root().join("corpus/golden/verdicts.json")).unwrap();
    serde_json::from_str(&src).unwrap()
}

#[test]
fn corpus_matches_golden_and_revalidates() {
    let registry = builtin_theories();
    let lookup = |n: &str| registry.get(n).map(|e| e.spec);
    let got = corpus_verdicts(&registry, Budget::default());
    let summaries: BTreeMap<String, String> = got.iter().map(|(n, v)| (n.clone(), v.summary())).collect();
    assert_eq!(summaries, golden());
    for (name, v) in &got {
        let t = registry.get(name).unwrap().spec;
        assert!(revalidate_verdict(&t, v, &registry, &lookup), "{name}");
    }
}

#[test]
fn small_fuel_never_flips_a_verdict() {
    let registry = builtin_theories();
    let full = golden();
    for (name, v) in corpus_verdicts(&registry, Budget { fuel: 500, ..Budget::default() }) {
        if !matches!(v, SensibilityVerdict::Unknown { .. }) {
            assert_eq!(v.summary(), full[&name], "{name}");
        }
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let registry = builtin_theories();
    let budget = Budget { fuel: 500, ..Budget::default() };
    let render = |v: Vec<(String, SensibilityVerdict)>| serde_json::to_string(&v).unwrap();
    set_parallel(false);
    let seq = render(corpus_verdicts(&registry, budget));
    set_parallel(true);
    let par = render(corpus_verdicts(&registry, budget));
    assert_eq!(seq, par);
}
