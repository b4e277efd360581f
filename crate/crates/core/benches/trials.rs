use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use arsum::cli::{run_all, Format, RunConfig};
use arsum::identities::Id;
use arsum::lattice::MultiIndex;
use arsum::matinv::{verify_orthogonality, MatrixPair, MmicParams};
use arsum::numerics::{Backend, NumericConfig};
use arsum::par::Exec;
use num_rational::BigRational;

fn config(ids: Vec<Id>, backend: Backend, r: usize, trials: usize, exec: Exec) -> RunConfig {
    RunConfig {
        ids,
        r_min: r,
        r_max: r,
        trials,
        seed: 7,
        backend,
        numeric: NumericConfig::default(),
        out: None,
        format: Format::Json,
        exec,
    }
}

fn trials(c: &mut Criterion) {
    let mut g = c.benchmark_group("trials");
    g.sample_size(10);
    let cases = [
        ("exact_8phi7_r3", vec![Id::NewAr8phi7, Id::MilneAr8phi7], Backend::Exact, 3, 8),
        ("float_6phi5_r2", vec![Id::NewAr6phi5Nonterm], Backend::float(256).unwrap(), 2, 8),
    ];
    for (name, ids, backend, r, n) in cases {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let cfg = config(ids.clone(), backend, r, n, exec);
            g.bench_with_input(BenchmarkId::new(name, format!("{exec:?}")), &cfg, |b, cfg| b.iter(|| run_all(cfg)));
        }
    }
    g.finish();
}

fn orthogonality(c: &mut Criterion) {
    let mut g = c.benchmark_group("orthogonality");
    g.sample_size(10);
    let e = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let pair =
        MatrixPair::Mmic(MmicParams { a: e(2, 7), b: e(-3, 5), x: vec![e(1, 1), e(5, 3), e(-7, 2)], q: e(1, 3) });
    let bound = MultiIndex::from(vec![2, 2, 2]);
    let cfg = NumericConfig::default();
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_function(BenchmarkId::new("mmic_r3", format!("{exec:?}")), |b| {
            b.iter(|| verify_orthogonality(&pair, &bound, &cfg, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, trials, orthogonality);
criterion_main!(benches);
