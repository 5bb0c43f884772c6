use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use minmove_bench::{line_mesh, radial_front};
use minmove_core::{minimize_step, run, OperatorSet, PotentialSpec, SolverParams};

fn operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("operator_set");
    for n in [64, 200, 400] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| OperatorSet::new(line_mesh(n), 0.5).unwrap())
        });
    }
    group.finish();
}

fn single_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimize_step");
    for (name, solver) in [("off", SolverParams::default()), ("spectral", SolverParams::spectral())] {
        let config = radial_front(400, 10);
        let ops = &config.ops;
        let u = config.u0.clone();
        let tau = 5e-4;
        group.bench_function(name, |b| {
            b.iter(|| {
                minimize_step(
                    ops,
                    &config.potential,
                    black_box(&u),
                    &u,
                    tau,
                    None,
                    &solver,
                    &u,
                )
                .unwrap()
            })
        });
    }
    let config = radial_front(400, 10);
    let zero = PotentialSpec::zero(1);
    let u = config.u0.clone();
    group.bench_function("linear", |b| {
        b.iter(|| {
            minimize_step(
                &config.ops,
                &zero,
                black_box(&u),
                &u,
                5e-4,
                None,
                &SolverParams::spectral(),
                &u,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn short_run(c: &mut Criterion) {
    let config = radial_front(400, 100);
    let mut group = c.benchmark_group("run");
    group.sample_size(10);
    group.bench_function("radial_front_100_steps", |b| b.iter(|| run(&config).unwrap()));
    group.finish();
}

criterion_group!(benches, operators, single_step, short_run);
criterion_main!(benches);
