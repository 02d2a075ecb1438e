use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use finsmooth_bench::{algebra, planar_randers, spatial_randers};
use finsmooth_core::dualmax::dual_norm;
use finsmooth_core::extremal::{cf4_step, integrate_vertical};
use finsmooth_core::mollify::build_mollified_norm;
use finsmooth_core::{AlgebraName, IntegrationOptions, SmoothingOptions};

fn dual(c: &mut Criterion) {
    let (n2, _) = planar_randers().unwrap();
    let (n3, _) = spatial_randers().unwrap();
    c.bench_function("dual_norm/randers2", |b| b.iter(|| dual_norm(&n2, black_box(&[0.3, -0.8])).unwrap()));
    c.bench_function("dual_norm/randers3", |b| b.iter(|| dual_norm(&n3, black_box(&[0.3, -0.8, 0.5])).unwrap()));
}

fn smoothing(c: &mut Criterion) {
    let (norm, consts) = planar_randers().unwrap();
    let opts = SmoothingOptions::default_for(2);
    let eps = 0.5 * consts.tau;
    let mut group = c.benchmark_group("mollified");
    group.sample_size(10);
    group.bench_function("build/randers2", |b| {
        b.iter(|| build_mollified_norm(&norm, &consts, black_box(eps), &opts).unwrap())
    });
    let mn = build_mollified_norm(&norm, &consts, eps, &opts).unwrap();
    group.bench_function("eval/randers2", |b| b.iter(|| mn.eval(black_box(&[0.6, -0.7]))));
    group.finish();
}

fn extremals(c: &mut Criterion) {
    let (norm, _) = spatial_randers().unwrap();
    let so3 = algebra(AlgebraName::So3);
    let opts = IntegrationOptions::default();
    let mut group = c.benchmark_group("extremal");
    group.sample_size(10);
    group.bench_function("rk4/so3_randers_1000_steps", |b| {
        b.iter(|| integrate_vertical(&so3, &norm, black_box(&[1.0, 0.5, -0.3]), (0.0, 1.0), 1e-3, &opts).unwrap())
    });
    let x = so3.identity().unwrap();
    group.bench_function("cf4_step/so3", |b| {
        b.iter(|| cf4_step(&so3, &x, black_box(&[0.1, 0.2, 0.3]), black_box(&[0.2, 0.1, 0.0]), 1e-3).unwrap())
    });
    group.finish();
}

criterion_group!(benches, dual, smoothing, extremals);
criterion_main!(benches);
