use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use querylab::completion::{completion_complexity, Measure};
use querylab::perturbation::{pf_solve_reduced, reduce_3sat_to_lma, reduce_lma_to_pf, Cnf, Origin, DEFAULT_EFFORT};
use querylab::verify::{instance_rng, verify_suite, Suite, VerifyConfig};
use querylab::{random_partial, Exec};

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify-s3");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let config = VerifyConfig {
            instances: Some(48),
            max_n: Some(5),
            exec,
            ..VerifyConfig::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| verify_suite(Suite::S3Inequalities, black_box(&config)).unwrap())
        });
    }
    group.finish();
}

fn completions(c: &mut Criterion) {
    let f = random_partial(5, 10, &mut instance_rng(7, 0)).unwrap();
    let mut group = c.benchmark_group("completion-D");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| completion_complexity(black_box(&f), Measure::D, 16, exec).unwrap())
        });
    }
    group.finish();
}

fn sign_enumeration(c: &mut Criterion) {
    // unsatisfiable, so every sign vector is visited
    let clauses = (0..8)
        .map(|m| (1..=3).map(|i| if m >> (i - 1) & 1 == 1 { -i } else { i }).collect())
        .collect();
    let cnf = Cnf { vars: 12, clauses };
    let inst = reduce_lma_to_pf(&reduce_3sat_to_lma(&cnf).unwrap()).unwrap();
    let mut group = c.benchmark_group("pf-enumeration");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pf_solve_reduced(black_box(&inst), Origin::SatReduced, DEFAULT_EFFORT, 0, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps, completions, sign_enumeration);
criterion_main!(benches);
