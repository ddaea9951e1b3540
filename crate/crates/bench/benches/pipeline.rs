use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use retroscat_bench::{reference_measurements, reference_scene};
use retroscat_core::analytic::modal_coefficients;
use retroscat_core::bie::{assemble_and_solve, ParametricBoundary};
use retroscat_core::imaging::{scan_grid, topological_derivative, ImagingOptions};
use retroscat_core::special::{bessel_j, bessel_y};
use retroscat_core::transport::build_kernel;
use retroscat_core::types::{derive_params, GridSpec, Point2, Scene, SceneObject};

fn bench_special(c: &mut Criterion) {
    let mut g = c.benchmark_group("special");
    g.bench_function("bessel_j upward n16 x40", |b| {
        b.iter(|| bessel_j(black_box(16), black_box(40.0)).unwrap())
    });
    g.bench_function("bessel_j miller n40 x5", |b| {
        b.iter(|| bessel_j(black_box(40), black_box(5.0)).unwrap())
    });
    g.bench_function("bessel_y n16 x40", |b| {
        b.iter(|| bessel_y(black_box(16), black_box(40.0)).unwrap())
    });
    g.finish();
}

fn bench_forward(c: &mut Criterion) {
    let mut g = c.benchmark_group("forward");
    let (scene, _) = reference_scene();
    let eta = Point2::new(0.6, 0.8);
    let x = Point2::new(30.0, 60.0);
    g.bench_function("modal solve + field", |b| {
        b.iter(|| {
            modal_coefficients(black_box(&scene), eta, None)
                .unwrap()
                .scattered_field(x)
                .unwrap()
        })
    });

    let params = derive_params(2.0, 1.0, 1.0, 4.0, 1.0).unwrap();
    let object = SceneObject::disk(Point2::new(0.0, 0.0), 1.0);
    let _ = Scene::new(object, params).unwrap();
    for nodes in [64usize, 128] {
        let boundary = ParametricBoundary::from_object(&object, nodes).unwrap();
        g.bench_function(format!("bie assemble+solve {nodes} nodes"), |b| {
            b.iter(|| assemble_and_solve(black_box(&boundary), &params, eta).unwrap())
        });
    }
    g.finish();
}

fn bench_imaging(c: &mut Criterion) {
    let mut g = c.benchmark_group("imaging");
    let set = reference_measurements();
    let z = Point2::new(0.4, 1.0);
    g.bench_function("build_kernel 121 receivers", |b| {
        b.iter(|| build_kernel(black_box(z), &set, &set.geometry).unwrap())
    });
    let kernel = build_kernel(z, &set, &set.geometry).unwrap();
    g.bench_function("topological_derivative", |b| {
        b.iter(|| topological_derivative(black_box(&kernel), &set, None).unwrap())
    });
    let grid = GridSpec::new((-5.0, 5.0), (-3.0, 4.0), 32, 32).unwrap();
    g.bench_function("scan_grid 32x32", |b| {
        b.iter(|| scan_grid(black_box(&grid), &set, &ImagingOptions::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_special, bench_forward, bench_imaging);
criterion_main!(benches);
