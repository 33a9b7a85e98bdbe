use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use taut_core::cohft::{rmatrix_action, rmatrix_zvonkine};
use taut_core::graphs::enumerate_stable_graphs;
use taut_core::pixton::{pixton_fixed_r, PixtonInput};
use taut_core::strata::TautClass;

fn graph_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_stable_graphs");
    for (g, n) in [(1, 3), (2, 1), (2, 2)] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{g},{n}")),
            &(g, n),
            |b, &(g, n)| b.iter(|| enumerate_stable_graphs(black_box(g), black_box(n)).unwrap()),
        );
    }
    group.finish();
}

fn pixton_sums(c: &mut Criterion) {
    let mut group = c.benchmark_group("pixton_fixed_r");
    group.sample_size(20);
    let cases: [(u32, &[i64], usize); 3] = [(1, &[1, -1], 2), (1, &[2, 1, -3], 3), (2, &[0], 3)];
    for (g, a, d) in cases {
        let input = PixtonInput::new(g, a, 0).unwrap().with_max_codim(d).unwrap();
        let r = input.default_r_min();
        group.bench_function(format!("g={g} A={a:?} d={d}"), |b| {
            b.iter(|| pixton_fixed_r(black_box(&input), r).unwrap())
        });
    }
    group.finish();
}

fn products(c: &mut Criterion) {
    let mut group = c.benchmark_group("mul");
    group.sample_size(20);
    let psi = TautClass::psi(2, 1, 1, 1);
    let kappa = TautClass::kappa(2, 1, 1);
    let p2 = psi.mul(&psi);
    group.bench_function("psi*kappa on (2,1)", |b| {
        b.iter(|| black_box(&psi).mul(black_box(&kappa)))
    });
    group.bench_function("psi^2*kappa on (2,1)", |b| {
        b.iter(|| black_box(&p2).mul(black_box(&kappa)))
    });
    group.finish();
}

fn rmatrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("rmatrix_action");
    group.sample_size(20);
    for r in [3u32, 5] {
        let spec = rmatrix_zvonkine(r, 4);
        group.bench_function(format!("g=1 n=2 r={r} codim<=2"), |b| {
            b.iter(|| rmatrix_action(black_box(&spec), 1, &[1, r - 1], 2).unwrap())
        });
        group.bench_function(format!("g=2 n=1 r={r} codim<=3"), |b| {
            b.iter(|| rmatrix_action(black_box(&spec), 2, &[0], 3).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, graph_enumeration, pixton_sums, products, rmatrix);
criterion_main!(benches);
