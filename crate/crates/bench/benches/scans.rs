use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use phiscan_core::density::Threshold;
use phiscan_core::{
    density_estimate, primes_up_to, primorial_scan, theorem4_exceptions, totient_table,
    PrimorialConfig, ScanBound, ScanConstants, SieveConfig,
};

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    g.sample_size(10);
    for limit in [1_000_000u64, 10_000_000] {
        g.bench_with_input(BenchmarkId::from_parameter(limit), &limit, |b, &n| {
            b.iter(|| primes_up_to(&SieveConfig::new(n)).unwrap().count())
        });
    }
    g.finish();
}

fn primorial(c: &mut Criterion) {
    let constants = ScanConstants::standard().unwrap();
    let mut g = c.benchmark_group("primorial_scan");
    g.sample_size(10);
    for limit in [100_000u64, 1_000_000] {
        let cfg = PrimorialConfig::new(ScanBound::PMax(limit), constants);
        g.bench_with_input(BenchmarkId::from_parameter(limit), &cfg, |b, cfg| {
            b.iter(|| primorial_scan(cfg).unwrap().map(Result::unwrap).count())
        });
    }
    g.finish();
}

fn totients(c: &mut Criterion) {
    let mut g = c.benchmark_group("totient_table");
    g.sample_size(10);
    g.bench_function("1e6", |b| b.iter(|| totient_table(black_box(1_000_000)).unwrap()));
    g.finish();

    let table = totient_table(1_000_000).unwrap();
    let mut g = c.benchmark_group("density");
    g.sample_size(20);
    g.bench_function("rational t=3", |b| {
        let t = Threshold::rational(3, 1).unwrap();
        b.iter(|| density_estimate(&table, t, 1_000_000).unwrap().count)
    });
    g.bench_function("exceptions c0=0.15", |b| {
        b.iter(|| theorem4_exceptions(&table, 1_000_000, 0.15).unwrap().count)
    });
    g.finish();
}

criterion_group!(benches, sieve, primorial, totients);
criterion_main!(benches);
