use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hypconv::{dist_h2, from_klein, geod_h2, to_klein};
use hypconv_bench::h2_points;

fn geometry(c: &mut Criterion) {
    let pts = h2_points(256);
    c.bench_function("dist_h2 x255", |b| {
        b.iter(|| pts.windows(2).map(|w| dist_h2(black_box(&w[0]), black_box(&w[1])).unwrap()).sum::<f64>())
    });
    c.bench_function("geod_h2 x255", |b| {
        b.iter(|| {
            pts.windows(2).map(|w| geod_h2(black_box(&w[0]), black_box(&w[1]), black_box(0.37)).unwrap().y).sum::<f64>()
        })
    });
    c.bench_function("klein round trip x256", |b| {
        b.iter(|| pts.iter().map(|p| from_klein(&to_klein(black_box(p)).unwrap()).unwrap().x).sum::<f64>())
    });
}

criterion_group!(benches, geometry);
criterion_main!(benches);
