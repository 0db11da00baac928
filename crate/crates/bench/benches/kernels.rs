use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geotan_core::generators::{gen_spiral, plane_patch};
use geotan_core::metric::excess_brute;
use geotan_core::tangent::{aw_cauchy_scan, blow_up};
use geotan_core::{excess, hausdorff_content_upper, pgh_oracle, FiniteMetricSpace, SearchMode};
use std::hint::black_box;

fn bench_excess(c: &mut Criterion) {
    let mut g = c.benchmark_group("excess");
    for h in [1.0 / 16.0, 1.0 / 32.0] {
        let a = plane_patch(1.0, h).unwrap();
        let b = plane_patch(1.0, h * 0.9).unwrap();
        let n = a.len();
        g.bench_with_input(BenchmarkId::new("kd", n), &(&a, &b), |bench, (a, b)| {
            bench.iter(|| excess(black_box(a), black_box(b)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("brute", n), &(&a, &b), |bench, (a, b)| {
            bench.iter(|| excess_brute(black_box(a), black_box(b)).unwrap())
        });
    }
    g.finish();
}

fn bench_pgh(c: &mut Criterion) {
    let e = gen_spiral(1e-3, 1.0, 4e-3).unwrap();
    let t = blow_up(&e, &[0.0, 0.0], 0.5, 1.0).unwrap();
    let mut g = c.benchmark_group("pgh_oracle");
    for k in [5usize, 7] {
        let step = (t.window.len() / k).max(1);
        let idx: Vec<usize> = (0..t.window.len()).step_by(step).take(k).collect();
        let x = FiniteMetricSpace::from_point_set(&t.window.subset(&idx), Some(0)).unwrap();
        let y = x.scaled(1.1);
        g.bench_with_input(BenchmarkId::new("exhaustive", k), &(&x, &y), |bench, (x, y)| {
            bench.iter(|| pgh_oracle(x, y, SearchMode::Exhaustive).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("heuristic", k), &(&x, &y), |bench, (x, y)| {
            bench.iter(|| pgh_oracle(x, y, SearchMode::Heuristic { budget: 2000 }).unwrap())
        });
    }
    g.finish();
}

fn bench_scan(c: &mut Criterion) {
    let e = gen_spiral(1e-4, 1.0, 1e-3).unwrap();
    c.bench_function("aw_cauchy_scan/spiral", |bench| {
        bench.iter(|| aw_cauchy_scan(&e, &[0.0, 0.0], &[0.125, 0.0625, 0.03125], 1.0).unwrap())
    });
    let p = plane_patch(1.0, 1.0 / 32.0).unwrap();
    c.bench_function("hausdorff_content_upper/plane", |bench| {
        bench.iter(|| hausdorff_content_upper(&p, 2.0, 0.25).unwrap())
    });
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(20);
    targets = bench_excess, bench_pgh, bench_scan
}
criterion_main!(kernels);
