//! Parallel-vs-sequential benchmarks for the contour-node work.
//!
//! With the default `parallel` feature the factorization cache build and
//! the per-node back-substitution streams run on rayon; the "seq" series
//! pins a one-thread pool for comparison, so both numbers come from one
//! binary. Building with `--no-default-features` benches the plain
//! sequential code path instead.

use criterion::{criterion_group, criterion_main, Criterion};
use fracsinc::hpfem::{AnalyticFn, Coefficients1D};
use fracsinc::solver::{prepare, DiscretizationConfig, FracProblem, SourceTerm};
use std::f64::consts::PI;
use std::sync::Arc;

fn problem() -> FracProblem {
    FracProblem::new(
        0.6,
        0.75,
        1.0,
        (0.0, 1.0),
        Coefficients1D::constant(1.0, 0.0),
        AnalyticFn::with_derivative(
            |x| (2.0 * PI * x).sin(),
            |x| 2.0 * PI * (2.0 * PI * x).cos(),
        ),
        SourceTerm::Separable {
            time: Arc::new(|t: f64| t.sin()),
            space: AnalyticFn::with_derivative(|x| (PI * x).sin(), |x| PI * (PI * x).cos()),
        },
    )
    .unwrap()
}

fn bench_prepare(c: &mut Criterion) {
    let p = 7usize;
    let problem = problem();
    let config = DiscretizationConfig::from_degree(p);
    let mut group = c.benchmark_group("prepare_p7");
    group.sample_size(10);
    #[cfg(feature = "parallel")]
    {
        group.bench_function("parallel", |b| {
            b.iter(|| prepare(&problem, &config).unwrap())
        });
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        group.bench_function("seq(1 thread)", |b| {
            b.iter(|| pool.install(|| prepare(&problem, &config).unwrap()))
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| {
        b.iter(|| prepare(&problem, &config).unwrap())
    });
    group.finish();
}

fn bench_eval(c: &mut Criterion) {
    let p = 7usize;
    let problem = problem();
    let sol = prepare(&problem, &DiscretizationConfig::from_degree(p)).unwrap();
    let mut group = c.benchmark_group("eval_full_p7");
    group.sample_size(10);
    #[cfg(feature = "parallel")]
    {
        group.bench_function("parallel", |b| b.iter(|| sol.eval(0.9).unwrap()));
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        group.bench_function("seq(1 thread)", |b| {
            b.iter(|| pool.install(|| sol.eval(0.9).unwrap()))
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| b.iter(|| sol.eval(0.9).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_prepare, bench_eval);
criterion_main!(benches);
