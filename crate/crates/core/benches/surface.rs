use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use opspread_core::experiment::preset;
use opspread_core::otoc::{build_surface_with, Execution};

fn executions() -> Vec<(&'static str, Execution)> {
    vec![
        ("sequential", Execution::Sequential),
        #[cfg(feature = "parallel")]
        ("parallel", Execution::Parallel { threads: None }),
    ]
}

fn bench_surfaces(c: &mut Criterion) {
    let mut group = c.benchmark_group("surface");
    group.sample_size(10);
    for name in ["fig1b", "fig2", "fig4"] {
        let config = preset(name).expect("bundled preset");
        for (label, exec) in executions() {
            group.bench_with_input(BenchmarkId::new(label, name), &config, |b, cfg| {
                b.iter(|| build_surface_with(cfg, exec).expect("surface builds"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_surfaces);
criterion_main!(benches);
