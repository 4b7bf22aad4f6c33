use criterion::{black_box, criterion_group, criterion_main, Criterion};
use fracgeo_core::bodies::{cube, regular_fan_2d, regular_polygon, wulff_shape};
use fracgeo_core::fracperim::ps_xray;
use fracgeo_core::measures::area_measure;
use fracgeo_core::quadrature::{boundary_rule_graded, sphere_rule};
use fracgeo_core::GaugeBody;

fn xray(c: &mut Criterion) {
    let pentagon = regular_polygon(5, 1.0, 0.0);
    let ball = GaugeBody::ball(2);
    let rule = sphere_rule(2, 256);
    c.bench_function("ps_xray pentagon 256x256", |b| b.iter(|| ps_xray(black_box(&pentagon), &ball, 0.5, &rule, 256).unwrap()));
    let cube3 = cube(3, 1.0);
    let cube_gauge = GaugeBody::cube(3);
    let rule3 = sphere_rule(3, 64);
    c.bench_function("ps_xray cube 64 dirs x 64²", |b| b.iter(|| ps_xray(black_box(&cube3), &cube_gauge, 0.5, &rule3, 64).unwrap()));
}

fn measure(c: &mut Criterion) {
    let hexagon = regular_polygon(6, 1.0, 0.2);
    let square = GaugeBody::cube(2);
    let bq = boundary_rule_graded(&hexagon, 32, 4.0);
    let rule = sphere_rule(2, 256);
    c.bench_function("area_measure hexagon", |b| b.iter(|| area_measure(black_box(&hexagon), &square, 0.5, &bq, &rule).unwrap()));
}

fn wulff(c: &mut Criterion) {
    let fan = regular_fan_2d(64, 0.0);
    let h: Vec<f64> = (0..64).map(|i| 1.0 + 0.2 * (i as f64 * 0.7).sin()).collect();
    c.bench_function("wulff_shape 64 normals", |b| b.iter(|| wulff_shape(2, black_box(&fan), black_box(&h)).unwrap()));
    let rule = sphere_rule(3, 64);
    let normals: Vec<_> = rule.nodes.iter().copied().take(100).collect();
    let h3 = vec![1.0; normals.len()];
    c.bench_function("wulff_shape 3d", |b| b.iter(|| wulff_shape(3, black_box(&normals), black_box(&h3)).unwrap()));
}

criterion_group!(benches, xray, measure, wulff);
criterion_main!(benches);
