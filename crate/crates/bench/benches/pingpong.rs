use circle_rds::circle::neighborhood;
use circle_rds::pingpong::{check_certificate, relator_search};
use circle_rds::{CircleMap, CirclePoint, MoebiusMap};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn pair() -> (CircleMap, CircleMap) {
    let f = CircleMap::Moebius(MoebiusMap::diagonal(10.0).unwrap());
    let quarter = CircleMap::rotation(0.25);
    let g = quarter.compose(&f).compose(&CircleMap::rotation(-0.25));
    (f, g)
}

fn certificate(c: &mut Criterion) {
    let (f, g) = pair();
    let b = |x: f64| neighborhood(CirclePoint::new(x), 0.05).unwrap();
    let arcs = [b(0.5), b(0.0), b(0.75), b(0.25)];
    c.bench_function("check_certificate", |bench| {
        bench.iter(|| check_certificate(&f, &g, black_box(arcs[0]), arcs[1], arcs[2], arcs[3]))
    });
}

fn relators(c: &mut Criterion) {
    let (f, g) = pair();
    let mut group = c.benchmark_group("relator_search");
    group.sample_size(10);
    for len in [4, 6, 8] {
        group.bench_function(format!("max_len_{len}"), |b| b.iter(|| relator_search(&f, &g, len, 64, 1e-6)));
    }
    group.finish();
}

criterion_group!(benches, certificate, relators);
criterion_main!(benches);
