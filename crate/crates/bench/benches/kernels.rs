use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orthofield::bounds::i_integral;
use orthofield::holder::seq_norm;
use orthofield::{
    generate, prefix_sum, BaseDist, GeneratorSpec, Modulus, MultiIndex, PartialSumProcess,
    SeedSpec, SlowlyVarying,
};

fn gaussian(d: usize) -> GeneratorSpec {
    GeneratorSpec::iid(BaseDist::Gaussian { sigma: 1.0 }, d).unwrap()
}

fn kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("prefix_sum");
    for shape in [vec![64, 64], vec![256, 256], vec![32, 32, 32]] {
        let n = MultiIndex::new(shape.clone()).unwrap();
        let f = generate(&gaussian(shape.len()), &n, SeedSpec::new(1, 0)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(format!("{shape:?}")), &f.values, |b, v| {
            b.iter(|| prefix_sum(black_box(v)))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("generate");
    let n = MultiIndex::new(vec![64, 64]).unwrap();
    for (name, spec) in [
        ("iid_gaussian", gaussian(2)),
        ("iid_rademacher", GeneratorSpec::iid(BaseDist::Rademacher, 2).unwrap()),
        ("product_rademacher", GeneratorSpec::product_rademacher(2).unwrap()),
    ] {
        g.bench_function(name, |b| {
            let mut r = 0;
            b.iter(|| {
                r += 1;
                generate(&spec, &n, SeedSpec::new(7, r)).unwrap()
            })
        });
    }
    g.finish();

    let n = MultiIndex::new(vec![128, 128]).unwrap();
    let w = PartialSumProcess::new(generate(&gaussian(2), &n, SeedSpec::new(3, 0)).unwrap().values);
    c.bench_function("w_eval_128x128", |b| {
        b.iter(|| w.eval(black_box(&[0.37, 0.81])).unwrap())
    });

    let rho = Modulus::new(4f64.exp(), 2, SlowlyVarying::IterLog).unwrap();
    c.bench_function("seq_norm_128x128_j7", |b| {
        b.iter(|| seq_norm(|t| w.eval(t), &rho, 7).unwrap())
    });

    let mut g = c.benchmark_group("i_integral");
    g.sample_size(10);
    for t in [1.0, 100.0] {
        g.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| i_integral(black_box(t), 2).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
