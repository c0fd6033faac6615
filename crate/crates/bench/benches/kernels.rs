use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fractalab_bench::{systems, uniform_cloud};
use fractalab_core::content::{hausdorff_content_upper, ContentInput};
use fractalab_core::cutset::{awsc_statistic, cut_set, CenterPlan};
use fractalab_core::gallery;
use fractalab_core::targets::{dyadic_ladder, limsup_box_dimension, target_balls, EpsLadder};
use fractalab_core::thermo::{conformality_dimension, pressure_enumerated};

fn pressure(c: &mut Criterion) {
    let mut group = c.benchmark_group("pressure");
    for (name, sys) in systems() {
        group.bench_with_input(BenchmarkId::new("enumerated k=10", name), &sys, |b, sys| {
            b.iter(|| pressure_enumerated(sys, black_box(0.6), 10).unwrap())
        });
    }
    group.finish();
}

fn dimension(c: &mut Criterion) {
    let sys = gallery::nonlinear_cantor();
    c.bench_function("dimension nonlinear-cantor", |b| {
        b.iter(|| conformality_dimension(black_box(&sys), 1e-6).unwrap())
    });
}

fn cut_sets(c: &mut Criterion) {
    let mut group = c.benchmark_group("cut_set");
    for (name, sys) in systems() {
        group.bench_with_input(BenchmarkId::new("r=1e-3", name), &sys, |b, sys| {
            b.iter(|| cut_set(sys, black_box(1e-3)).unwrap())
        });
    }
    group.finish();
}

fn awsc(c: &mut Criterion) {
    let sys = gallery::sierpinski();
    c.bench_function("awsc sierpinski k=8", |b| {
        b.iter(|| awsc_statistic(&sys, black_box(8), &CenterPlan::default()).unwrap())
    });
}

fn shrinking_targets(c: &mut Criterion) {
    let sys = gallery::cantor();
    let ladder = dyadic_ladder(0.5, 0.5f64.powi(15)).unwrap();
    c.bench_function("target_balls cantor δ=1", |b| {
        b.iter(|| target_balls(&sys, &[0.0], black_box(1.0), &ladder).unwrap())
    });
    let exp = target_balls(&sys, &[0.0], 1.0, &ladder).unwrap();
    c.bench_function("limsup_box_dimension cantor δ=1", |b| {
        b.iter(|| limsup_box_dimension(black_box(&exp), EpsLadder::default()).unwrap())
    });
}

fn content(c: &mut Criterion) {
    let sys = gallery::cantor();
    let cloud = uniform_cloud(&sys, 100_000);
    c.bench_function("hausdorff_content_upper cantor 1e5 points", |b| {
        b.iter(|| hausdorff_content_upper(ContentInput::Points(&cloud), black_box(0.6), 3f64.powi(-8)).unwrap())
    });
}

fn sampling(c: &mut Criterion) {
    let sys = gallery::sierpinski();
    c.bench_function("attractor_sample sierpinski 1e5", |b| b.iter(|| uniform_cloud(black_box(&sys), 100_000)));
}

criterion_group!(benches, pressure, dimension, cut_sets, awsc, shrinking_targets, content, sampling);
criterion_main!(benches);
