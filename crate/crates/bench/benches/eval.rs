use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use kromlab::eval::{Evaluator, Limits, Route};
use kromlab::hierarchy::translate_sigma_k;
use kromlab_bench::{cycle, digraph, not_strongly_connected, sigma2_source};

fn specialized(c: &mut Criterion) {
    let f = not_strongly_connected();
    let mut g = c.benchmark_group("not_scc_2sat");
    for n in [10, 20] {
        for (label, s) in [("cycle", cycle(n)), ("gnp", digraph(n, 0.15, n as u64))] {
            g.bench_with_input(BenchmarkId::new(label, n), &s, |b, s| {
                let mut ev = Evaluator::new(Limits::default());
                b.iter(|| ev.check_route(black_box(&f), s, Route::Specialized).unwrap())
            });
        }
    }
    g.finish();
}

fn routes(c: &mut Criterion) {
    let f = not_strongly_connected();
    let s = cycle(3);
    let mut g = c.benchmark_group("routes_n3");
    for (label, route) in [("tree", Route::Tree), ("specialized", Route::Specialized)] {
        g.bench_function(label, |b| {
            let mut ev = Evaluator::new(Limits::default());
            b.iter(|| ev.check_route(black_box(&f), &s, route).unwrap())
        });
    }
    g.finish();
}

fn translate(c: &mut Criterion) {
    let src = sigma2_source();
    c.bench_function("translate_sigma2", |b| b.iter(|| translate_sigma_k(black_box(&src)).unwrap()));
}

criterion_group!(benches, specialized, routes, translate);
criterion_main!(benches);
