use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use maassp_core::exec::ExecMode;
use maassp_core::suites::{run_suite, SuiteConfig};

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for suite in ["splitting", "explicit-formula", "coleman", "graded", "cm"] {
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            let cfg = SuiteConfig { mode, ..SuiteConfig::default() };
            group.bench_with_input(BenchmarkId::new(suite, format!("{mode:?}")), &cfg, |b, cfg| {
                b.iter(|| black_box(run_suite(suite, cfg).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
