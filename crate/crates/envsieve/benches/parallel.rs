use criterion::{criterion_group, criterion_main, Criterion};
use envsieve::forms::LinearSystem;
use envsieve::{chen, exec, selberg};

fn bench_block_sum(c: &mut Criterion) {
    let mut g = c.benchmark_group("block_sum_1e7");
    let f = |lo: u64, hi: u64| (lo..hi).map(|k| 1.0 / k as f64).sum::<f64>();
    g.bench_function("parallel", |b| {
        b.iter(|| exec::sum_blocks(1, 10_000_001, exec::DEFAULT_BLOCK, f))
    });
    g.bench_function("sequential", |b| {
        b.iter(|| exec::sum_blocks_seq(1, 10_000_001, exec::DEFAULT_BLOCK, f))
    });
    g.finish();
}

// The envelope scan that dominates restriction and flatness experiments:
// beta over a window at a moderate level, via the stride kernel.
fn bench_beta_scan(c: &mut Criterion) {
    let f: LinearSystem = "n(n+2)".parse().unwrap();
    let kit = selberg::build_kit(&f, 20).unwrap();
    let mut g = c.benchmark_group("beta_table_1e6");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| selberg::beta_table(&kit, 1, 1_000_001))
    });
    g.finish();
}

// Partner classification over a block of primes: trial division plus
// primality tests, embarrassingly parallel across blocks.
fn bench_partner_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("partner_scan_2e5");
    g.sample_size(10);
    g.bench_function("classify", |b| {
        b.iter(|| chen::chen_records_up_to(200_000, chen::DEFAULT_EXPONENT).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_block_sum, bench_beta_scan, bench_partner_scan);
criterion_main!(benches);
