//! Monte Carlo and Fourier workloads on a one-thread pool against the
//! default pool. Build with `--no-default-features` to time the purely
//! sequential code path instead.

use std::hint::black_box;

use cobro_core::ctmc::{Generator, RegimeConfig};
use cobro_core::fourier::{FourierGrid, MarketParams, RainbowSpec, Style};
use cobro_core::pricing::{rainbow_price_fourier, sample_m};
use cobro_core::simulate::{cd_endpoints, euler_endpoints, ChainSampling, TimeGrid};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPool;

fn regime() -> RegimeConfig {
    let g = Generator::new(&[[-1.0, 0.8, 0.2], [0.4, -1.0, 0.6], [0.3, 0.7, -1.0]]).unwrap();
    RegimeConfig::new(g, vec![1.0, 0.0, 0.0], vec![0.3, 0.6, 0.9]).unwrap()
}

fn pools() -> Vec<(String, ThreadPool)> {
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![("single".into(), one), (format!("default-{}", default.current_num_threads()), default)]
}

fn monte_carlo(c: &mut Criterion) {
    let cfg = regime();
    let grid = TimeGrid::uniform(1.0, 100).unwrap();
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("cd_endpoints_20k", &name), |b| {
            b.iter(|| pool.install(|| black_box(cd_endpoints(&cfg, 1.0, ChainSampling::Exact, 20_000, 1).unwrap())))
        });
        group.bench_function(BenchmarkId::new("euler_endpoints_5k", &name), |b| {
            b.iter(|| pool.install(|| black_box(euler_endpoints(&cfg, &grid, 5000, 1).unwrap())))
        });
        group.bench_function(BenchmarkId::new("sample_m_100k", &name), |b| {
            b.iter(|| pool.install(|| black_box(sample_m(&cfg, 0.25, 100_000, 1).unwrap())))
        });
    }
    group.finish();
}

fn fourier(c: &mut Criterion) {
    let cfg = regime();
    let market = MarketParams::new(0.05, 100.0, 120.0, 0.2, 0.3).unwrap();
    let spec = RainbowSpec::new(Style::CallOnMax, 100.0, 0.25).unwrap();
    let grid = FourierGrid::coarse();
    let mut group = c.benchmark_group("fourier_double_sum");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("regime_call_on_max_n400", &name), |b| {
            b.iter(|| pool.install(|| black_box(rainbow_price_fourier(&cfg, &market, &spec, &grid).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, fourier);
criterion_main!(benches);
