use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use itt_core::par::set_parallel;
use itt_core::sensibility::{builtin_theories, corpus_verdicts, probe_unsolvable_typing, Budget};

fn corpus(c: &mut Criterion) {
    let registry = builtin_theories();
    let budget = Budget { fuel: 2_000, ..Budget::default() };
    let mut g = c.benchmark_group("corpus_verdicts");
    g.sample_size(10);
    for (label, on) in [("sequential", false), ("parallel", true)] {
        g.bench_function(label, |b| {
            set_parallel(on);
            b.iter(|| black_box(corpus_verdicts(&registry, budget)));
        });
    }
    g.finish();
}

fn probe(c: &mut Criterion) {
    let cdz = builtin_theories().get("CDZ").unwrap().spec;
    let mut g = c.benchmark_group("unsolvable_probe_cdz");
    g.sample_size(10);
    for (label, on) in [("sequential", false), ("parallel", true)] {
        g.bench_function(label, |b| {
            set_parallel(on);
            b.iter(|| black_box(probe_unsolvable_typing(&cdz, 2_000, 2, &[]).unwrap()));
        });
    }
    g.finish();
    set_parallel(true);
}

criterion_group!(benches, corpus, probe);
criterion_main!(benches);
