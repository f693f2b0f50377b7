use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use waistlab::estimators::diameter_of_intersection;
use waistlab::geometry::{build_net, haar_rotation};
use waistlab::measure::{sigma_exact, sigma_mc};
use waistlab::{BodySpec, OptimizerConfig, SubsphereQuery, Vector};

fn measure(c: &mut Criterion) {
    let q = SubsphereQuery::new(40, 19, 0.7).unwrap();
    c.bench_function("sigma_exact/m40", |b| b.iter(|| sigma_exact(black_box(&q))));
    c.bench_function("sigma_mc/m40/10k", |b| b.iter(|| sigma_mc(black_box(&q), 10_000, 1).unwrap()));
}

fn oracles(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracles");
    for n in [8usize, 32] {
        let cube = BodySpec::Cube { dim: n, half_width: 1.0 }.build().unwrap();
        let x = Vector::from_fn(n, |i, _| (i as f64 * 0.37).sin());
        g.bench_with_input(BenchmarkId::new("cube_support", n), &x, |b, x| b.iter(|| cube.support(black_box(x))));
        g.bench_with_input(BenchmarkId::new("cube_gauge", n), &x, |b, x| b.iter(|| cube.gauge(black_box(x))));
    }
    g.finish();
}

fn nets(c: &mut Criterion) {
    // uncached builds, so every iteration does the full greedy pass
    c.bench_function("net/n3/delta0.3", |b| b.iter(|| build_net(3, 0.3, black_box(7)).unwrap()));
}

fn diameters(c: &mut Criterion) {
    let mut g = c.benchmark_group("diameter_of_intersection");
    g.sample_size(10);
    for n in [4usize, 8] {
        let k = BodySpec::Cube { dim: n, half_width: 1.0 }.build().unwrap();
        let l = BodySpec::CrossPolytope { dim: n, radius: 2.0 }.build().unwrap();
        let u = haar_rotation(n, 3).unwrap();
        let opt = OptimizerConfig::default();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| diameter_of_intersection(&k, &l, &u, &opt).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, measure, oracles, nets, diameters);
criterion_main!(benches);
