use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use maglev_bench::{circuit, sphere, trap};
use maglev_core::field::{biot_savart_field, extract_gradients, CoilPair};
use maglev_core::pickup::{coupling_nu_analytic, coupling_nu_numeric, optimize_pickup, Axis, LoopGeometry, OptimizerSettings};
use maglev_core::sphere::solve_coefficients;
use maglev_core::Vec3;

fn field(c: &mut Criterion) {
    let coils = CoilPair::circular(1e-3, 1e-3, 10, 1.0).unwrap();
    let p = Vec3::new(1e-5, -2e-5, 3e-5);
    c.bench_function("biot_savart_point", |b| b.iter(|| biot_savart_field(black_box(&coils), black_box(p))));
    c.bench_function("extract_gradients", |b| b.iter(|| extract_gradients(black_box(&coils))));
}

fn sphere_response(c: &mut Criterion) {
    let (qf, s) = (trap(), sphere());
    let off = Vec3::new(1e-6, 2e-6, -1e-6);
    c.bench_function("multipole_solve", |b| b.iter(|| solve_coefficients(black_box(&qf), black_box(off), &s)));
}

fn pickup(c: &mut Criterion) {
    let (qf, s, circ) = (trap(), sphere(), circuit());
    let lp = LoopGeometry::coaxial_circle(100e-6, 60e-6).unwrap();
    c.bench_function("coupling_closed_form", |b| {
        b.iter(|| coupling_nu_analytic(147.0, 50e-6, black_box(100e-6), black_box(60e-6)))
    });
    c.bench_function("coupling_quadrature", |b| b.iter(|| coupling_nu_numeric(&qf, &s, black_box(&lp), Axis::Z)));
    let settings = OptimizerSettings::default();
    let mut g = c.benchmark_group("optimizer");
    g.sample_size(10);
    g.bench_function("optimize_pickup", |b| {
        b.iter(|| optimize_pickup(&s, 147.0, &circ, 0.3e-6, 0.45e-6, black_box(&settings)))
    });
    g.finish();
}

criterion_group!(benches, field, sphere_response, pickup);
criterion_main!(benches);
