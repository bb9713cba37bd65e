use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hausdorff_bergman::quadrature::bergman_norm_p;
use hausdorff_bergman::{
    Density, DensitySegment, HausdorffOperator, Measure, QuadratureConfig, TestFunction,
};

fn norm_of_hausdorff_image(c: &mut Criterion) {
    let mu = Measure::segment(DensitySegment::new(1.0, 2.0, Density::constant(1.0)).unwrap());
    let op = HausdorffOperator::new(mu, 2.0).unwrap();
    let f = TestFunction::new(2.0, 0.05).unwrap().to_function();
    let base = QuadratureConfig::with_tolerances(1e-8, 1e-12);

    let mut group = c.benchmark_group("norm_of_h_mu_f");
    group.sample_size(10);
    for (label, cfg) in [
        ("parallel", base.clone()),
        ("sequential", base.sequential()),
    ] {
        let hf = op.as_function(&f, &cfg).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(label), &cfg, |b, cfg| {
            b.iter(|| black_box(bergman_norm_p(&hf, 2.0, cfg).unwrap().value))
        });
    }
    group.finish();
}

criterion_group!(benches, norm_of_hausdorff_image);
criterion_main!(benches);
