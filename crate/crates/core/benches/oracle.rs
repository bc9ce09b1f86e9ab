//! Sequential against rayon execution for the oracle's hot paths.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gtcq_core::oracle::{commutator_residual_with, discretize, hermiticity_defect_with, Execution, Grid};
use gtcq_core::quantize::{hamiltonian, p_theta, DiffOp};
use gtcq_core::symcore::Expr;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn commutator(c: &mut Criterion) {
    let mut group = c.benchmark_group("commutator_residual");
    group.sample_size(10);
    for n in [16, 24, 32] {
        let g = Grid::new(n, 2.0, 1.0).unwrap();
        let h = discretize(&hamiltonian(&Expr::one(), &Expr::one()), &g).unwrap();
        let p = discretize(&p_theta(), &g).unwrap();
        let zero = discretize(&DiffOp::zero(), &g).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| black_box(commutator_residual_with(&p, &h, &zero, &g, exec)))
            });
        }
    }
    group.finish();
}

fn hermiticity(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermiticity_defect");
    group.sample_size(10);
    let g = Grid::new(24, 2.0, 1.0).unwrap();
    let d = p_theta();
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| black_box(hermiticity_defect_with(&d, &g, exec).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, commutator, hermiticity);
criterion_main!(benches);
