use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qpath_bench::{dense_workload, oracle_workload};
use qpath_core::densesim::{circuit_unitary, dense_amplitude, DenseMatrix, DENSE_DIM_CAP};
use qpath_core::pathsum::{amplitude_enumerate, amplitude_gauss_sum, build_phase};
use qpath_core::phasespace::wigner_transform;
use qpath_core::random::{case_rng, random_density};

fn bench_amplitude(c: &mut Criterion) {
    let ir = dense_workload();
    let form = build_phase(&ir);
    let q0 = vec![1u64, 2, 3];
    let qf = vec![4u64, 5, 6];

    let mut group = c.benchmark_group("amplitude-d7-n3");
    group.bench_function("enumerate", |b| {
        b.iter(|| {
            amplitude_enumerate(black_box(&form), black_box(&q0), black_box(&qf), 100_000_000)
                .expect("enumeration fits the cap")
        })
    });
    group.bench_function("gauss-sum", |b| {
        b.iter(|| {
            amplitude_gauss_sum(black_box(&form), black_box(&q0), black_box(&qf))
                .expect("quadratic sum always evaluates")
        })
    });
    group.finish();
}

fn bench_dense_oracle(c: &mut Criterion) {
    let ir = oracle_workload();
    let q0 = vec![1u64, 2];
    let qf = vec![3u64, 4];
    c.bench_function("dense-amplitude-d5-n2", |b| {
        b.iter(|| {
            dense_amplitude(black_box(&ir), black_box(&q0), black_box(&qf), DENSE_DIM_CAP)
                .expect("dimension fits the dense cap")
        })
    });
}

fn bench_wigner(c: &mut Criterion) {
    let ir = oracle_workload();
    let u = circuit_unitary(&ir, DENSE_DIM_CAP).expect("dimension fits the dense cap");
    let mut rng = case_rng(7, 0);
    let rho = random_density(&mut rng, 25);
    let evolved: DenseMatrix = u.conjugate(&rho);
    c.bench_function("wigner-transform-d5-n2", |b| {
        b.iter(|| wigner_transform(black_box(&evolved), 5, 2).expect("valid density"))
    });
}

criterion_group!(benches, bench_amplitude, bench_dense_oracle, bench_wigner);
criterion_main!(benches);
