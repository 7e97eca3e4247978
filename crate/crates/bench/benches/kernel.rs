use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use peelkit_bench::parabola;
use peelkit_core::geom::{convex_membership, hull_vertices, orientation};
use peelkit_core::Point;

fn kernel(c: &mut Criterion) {
    let simplex: Vec<Point> =
        [[0, 0, 0], [3, 1, 2], [1, 4, 1], [2, 2, 5]].iter().map(|r| Point::from_ints(r)).collect();
    c.bench_function("orientation_3d", |b| b.iter(|| orientation(black_box(&simplex), 3).unwrap()));

    let ps = parabola(12);
    let inside = Point::from_ints(&[5, 40]);
    c.bench_function("membership_parabola_12", |b| b.iter(|| convex_membership(black_box(&inside), &ps).unwrap()));
    c.bench_function("hull_parabola_12", |b| b.iter(|| hull_vertices(black_box(&ps))));
}

criterion_group!(benches, kernel);
criterion_main!(benches);
