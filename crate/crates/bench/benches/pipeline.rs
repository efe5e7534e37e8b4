use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nugap::plantcore::Polynomial;
use nugap::{hinf_norm, normalized_coprime_factorization, nu_metric, spectral_factor, winding_on_circle};
use nugap::{BoundaryFunction, Coordinate, DelayRationalPlant, NuOptions};
use nugap_bench::zero_family;

fn factorization(c: &mut Criterion) {
    let r = Polynomial::new(vec![10.0, 0.0, -2.0]).unwrap();
    c.bench_function("spectral_factor/deg2", |b| b.iter(|| spectral_factor(black_box(&r)).unwrap()));
    let plant = DelayRationalPlant::from_coeffs(
        0.5,
        &[1.0, -0.4, 2.0, 0.3],
        &[2.0, 1.0, -3.0, 0.5, 1.0],
    )
    .unwrap();
    c.bench_function("ncf/deg4", |b| b.iter(|| normalized_coprime_factorization(black_box(&plant)).unwrap()));
}

fn contour(c: &mut Criterion) {
    let f = BoundaryFunction::scalar(Coordinate::Disk, |z| z * z / (z - 2.0));
    c.bench_function("winding/r0.9", |b| b.iter(|| winding_on_circle(&f, black_box(0.9), 1024).unwrap()));
    let g = BoundaryFunction::scalar(Coordinate::HalfPlane, |s| 1.0 / (s * s + 0.2 * s + 1.0));
    c.bench_function("hinf_norm/resonance", |b| b.iter(|| hinf_norm(&g, 1e6, 2048).unwrap()));
}

fn metric(c: &mut Criterion) {
    let p1 = zero_family(1.0, 1.0, 3.0);
    let p2 = zero_family(1.0, 1.0, 3.2);
    let opts = NuOptions::default();
    let mut group = c.benchmark_group("nu_metric");
    group.sample_size(10);
    group.bench_function("zero_uncertainty", |b| b.iter(|| nu_metric(&p1, &p2, &opts).unwrap()));
    group.finish();
}

criterion_group!(benches, factorization, contour, metric);
criterion_main!(benches);
