use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ctc_bench::{build, coin_tower, expansion_roundtrip, guarded_toggles, parallel_chains};
use ctc_core::equiv::{check_pomset_bisim, check_step_bisim, Mode, Strength};
use ctc_core::StateModel;

fn state_space(c: &mut Criterion) {
    let m = StateModel::trivial();
    let mut g = c.benchmark_group("build_plts");
    for n in [2, 3, 4] {
        let p = parallel_chains(n);
        g.bench_with_input(BenchmarkId::new("parallel_chains", n), &p, |b, p| b.iter(|| build(black_box(p), &m)));
    }
    for n in [4, 8] {
        let p = coin_tower(n);
        g.bench_with_input(BenchmarkId::new("coin_tower", n), &p, |b, p| b.iter(|| build(black_box(p), &m)));
    }
    let (p, lm) = guarded_toggles(3);
    g.bench_function("guarded_toggles_3", |b| b.iter(|| build(black_box(&p), &lm)));
    g.finish();
}

fn equivalence(c: &mut Criterion) {
    let m = StateModel::trivial();
    let mut g = c.benchmark_group("equivalence");
    for n in [2, 3] {
        let a = build(&parallel_chains(n), &m);
        g.bench_with_input(BenchmarkId::new("step_fr_self", n), &a, |b, a| {
            b.iter(|| check_step_bisim(a, a, Mode::ForwardReverse, Strength::Strong).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("pomset_fr_weak_self", n), &a, |b, a| {
            b.iter(|| check_pomset_bisim(a, a, Mode::ForwardReverse, Strength::Weak, 2).unwrap())
        });
    }
    g.bench_function("expansion_roundtrip_3", |b| b.iter(|| expansion_roundtrip(black_box(3))));
    g.finish();
}

criterion_group!(benches, state_space, equivalence);
criterion_main!(benches);
