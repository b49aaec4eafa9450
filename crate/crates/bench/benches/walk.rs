use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use stoqwalk::fixtures;
use stoqwalk::hamiltonian::TAU_ZERO;
use stoqwalk::protocol::{choose_params, honest_prover, Verifier};
use stoqwalk::rng::stream;
use stoqwalk::walk::{choose_beta, transition_row};
use stoqwalk::{BasisString, ProjectorSet, Walker};
use stoqwalk_bench::{ising, projectors};

fn projector_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("projector_build");
    for n in [4, 8, 12] {
        let h = ising(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| ProjectorSet::build(black_box(h), TAU_ZERO).unwrap())
        });
    }
    g.finish();
}

fn row(c: &mut Criterion) {
    let h = ising(8);
    let projs = projectors(&h);
    let beta = choose_beta(&h).unwrap();
    let x = BasisString::new(0b1011_0010, 8).unwrap();
    c.bench_function("transition_row/ising8", |b| {
        b.iter(|| transition_row(&h, &projs, black_box(x), beta).unwrap())
    });
}

fn walk_steps(c: &mut Criterion) {
    let mut g = c.benchmark_group("walk_steps");
    let steps = 10_000;
    g.throughput(Throughput::Elements(steps as u64));
    for n in [4, 8] {
        let h = ising(n);
        let projs = projectors(&h);
        let beta = choose_beta(&h).unwrap();
        let x0 = BasisString::new(0, n).unwrap();
        // Rows are memoized, so warm the walker once and time steady state.
        let mut walker = Walker::new(&h, &projs, beta).unwrap();
        let mut rng = stream(1, 0);
        walker.run_to_end(x0, steps, &mut rng).unwrap();
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| walker.run_to_end(black_box(x0), steps, &mut rng).unwrap())
        });
    }
    g.finish();
}

fn verifier_runs(c: &mut Criterion) {
    let inst = fixtures::compiled(&fixtures::copy_circuit()).unwrap();
    let params = choose_params(&inst).unwrap();
    let v = Verifier::new(&inst, params).unwrap();
    let w = honest_prover(&inst).unwrap();
    let mut index = 0u64;
    c.bench_function("verifier_run/compiled_copy", |b| {
        b.iter_batched(
            || {
                index += 1;
                index
            },
            |i| v.run(black_box(w), 3, i).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, projector_build, row, walk_steps, verifier_runs);
criterion_main!(benches);
