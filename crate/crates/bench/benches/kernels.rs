use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use drbo_bench::{gp_dataset, qaoa_problem, worst_case_instance};
use drbo_core::dro::solve_worst_case;
use drbo_core::gp::{GpModel, HyperparameterPolicy};

fn simulator(c: &mut Criterion) {
    let mut group = c.benchmark_group("qaoa_noisy_evaluation");
    group.sample_size(20);
    for n in [4, 6, 8] {
        let problem = qaoa_problem(n, 1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &problem, |b, p| {
            b.iter(|| p.evaluate(black_box(&[0.6, 0.4]), 0.04).unwrap())
        });
    }
    group.finish();
}

fn gp_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("gp_grid_search_fit");
    group.sample_size(10);
    for n in [40, 120, 240] {
        let (x, y) = gp_dataset(n, 3);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(x, y), |b, (x, y)| {
            b.iter(|| GpModel::fit(x, y, &HyperparameterPolicy::GridSearch).unwrap())
        });
    }
    group.finish();
}

fn inner_solver(c: &mut Criterion) {
    let (ball, values) = worst_case_instance().unwrap();
    c.bench_function("worst_case_20_levels", |b| {
        b.iter(|| solve_worst_case(black_box(&values), &ball).unwrap())
    });
}

criterion_group!(benches, simulator, gp_fit, inner_solver);
criterion_main!(benches);
