//! Core workloads on a one-thread pool and on the global rayon pool.
//!
//! Build with `--no-default-features` to time the plain sequential fallback.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use starkondo::exact_diag::{spectrum, to_matrix};
use starkondo::free_fermion::{many_body_spectrum, secular_roots};
use starkondo::hamiltonians::{build_qf_spin, build_xx_spin, QFParams, XXParams};
use starkondo::jw::{verify_car, FamilyKind, FermionFamily};

type Workload = Box<dyn Fn() + Send + Sync>;

fn workloads() -> Vec<(&'static str, Workload)> {
    let xx = build_xx_spin(&XXParams::new(3, Complex64::new(0.7, 0.2)), true).unwrap();
    let qf = build_qf_spin(&QFParams::uniform_hopping(3, 1.0)).unwrap();
    let modes = secular_roots(4, 1.0).unwrap();
    let xx_sq = xx.clone();
    vec![
        (
            "opsum_product",
            Box::new(move || {
                black_box(xx_sq.product(&xx_sq).unwrap());
            }),
        ),
        (
            "to_matrix",
            Box::new(move || {
                black_box(to_matrix(&xx).unwrap());
            }),
        ),
        (
            "sector_spectrum",
            Box::new(move || {
                black_box(spectrum(&qf).unwrap());
            }),
        ),
        (
            "verify_car",
            Box::new(|| {
                let f = FermionFamily::new(FamilyKind::Klein, 3).unwrap();
                black_box(verify_car(&f).unwrap());
            }),
        ),
        (
            "secular_roots",
            Box::new(|| {
                black_box(secular_roots(150, 1.0).unwrap());
            }),
        ),
        (
            "many_body",
            Box::new(move || {
                black_box(many_body_spectrum(&modes, 12).unwrap());
            }),
        ),
    ]
}

fn bench(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let mut group = c.benchmark_group("core");
    group.sample_size(10);
    for (name, work) in workloads() {
        group.bench_function(BenchmarkId::new("sequential", name), |b| {
            b.iter(|| single.install(&work))
        });
        group.bench_function(BenchmarkId::new("parallel", name), |b| b.iter(&work));
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
