use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tagalign_bench::synth::noisy_corpus;
use tagalign_core::{align_tokens, lcs_dp_oracle, lcs_hunt_szymanski, Normalizer};

fn aligners(c: &mut Criterion) {
    let mut group = c.benchmark_group("align");
    for (lo, hi) in [(0, 60), (60, 100), (100, 200)] {
        let corpus = noisy_corpus(&[(lo, hi)], 64, 0.05, 17);
        let id = format!("{lo}-{hi}");
        group.bench_with_input(BenchmarkId::new("naive_dp", &id), &corpus, |b, corpus| {
            b.iter(|| {
                for p in corpus {
                    black_box(lcs_dp_oracle(&p.pred, &p.orig));
                }
            })
        });
        group.bench_with_input(
            BenchmarkId::new("hunt_szymanski", &id),
            &corpus,
            |b, corpus| {
                b.iter(|| {
                    for p in corpus {
                        black_box(lcs_hunt_szymanski(&p.pred, &p.orig));
                    }
                })
            },
        );
        group.bench_with_input(
            BenchmarkId::new("hierarchical", &id),
            &corpus,
            |b, corpus| {
                b.iter(|| {
                    for p in corpus {
                        black_box(align_tokens(&p.orig, &p.pred, &Normalizer::Identity));
                    }
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, aligners);
criterion_main!(benches);
