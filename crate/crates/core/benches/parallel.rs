use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use maxgrowth::acts::{act_growth, build_k_transitive};
use maxgrowth::par::Exec;
use maxgrowth::rational::rat;
use maxgrowth::words::letter_frequency_report;

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn k_transitive(c: &mut Criterion) {
    let act = build_k_transitive(2, 20_000).unwrap();
    let mut g = c.benchmark_group("k_transitive");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::new("act_growth", name), &exec, |b, &exec| {
            b.iter(|| act_growth(black_box(&act), 11, usize::MAX, exec).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("verify_witnesses", name), &exec, |b, &exec| {
            b.iter(|| act.verify_witnesses(|t| t.k() <= 2, exec).unwrap())
        });
    }
    g.finish();
}

fn frequencies(c: &mut Criterion) {
    let tol = rat(1, 50);
    let mut g = c.benchmark_group("letter_frequency");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| letter_frequency_report(2, 4000, 64, &tol, 7, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, k_transitive, frequencies);
criterion_main!(benches);
