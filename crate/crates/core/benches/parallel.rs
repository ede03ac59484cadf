//! Sequential against data-parallel execution on the two hot loops:
//! mining a few degrees and batch numeric verification.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use pairinv::miner::{mine, MineConfig};
use pairinv::numeric::{eval_genpoly, verify_identity, SamplerConfig, SamplerKind};
use pairinv::par;
use pairinv::ring::generator_set;

fn modes() -> [(&'static str, bool); 2] {
    [("sequential", true), ("parallel", false)]
}

fn bench_mining(c: &mut Criterion) {
    let mut group = c.benchmark_group("mine_n4_deg9");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    for (name, sequential) in modes() {
        group.bench_function(name, |b| {
            par::set_sequential(sequential);
            b.iter(|| black_box(mine(4, 9, MineConfig::default()).unwrap()));
        });
    }
    par::set_sequential(false);
    group.finish();
}

fn bench_verify(c: &mut Criterion) {
    let out = mine(3, 12, MineConfig::default()).unwrap();
    let rho = out.ideal.relations()[0].poly.clone();
    let gens = generator_set(3).unwrap();
    let cfg = SamplerConfig::with_seed(0);
    let mut group = c.benchmark_group("verify_n3_relation_20_pairs");
    group.sample_size(10);
    for (name, sequential) in modes() {
        group.bench_function(name, |b| {
            par::set_sequential(sequential);
            b.iter(|| {
                let v = verify_identity(
                    |pt| eval_genpoly(&rho, &pt.generator_values(&gens)),
                    SamplerKind::Generic,
                    3,
                    &cfg,
                    20,
                )
                .unwrap();
                black_box(v)
            });
        });
    }
    par::set_sequential(false);
    group.finish();
}

criterion_group!(benches, bench_mining, bench_verify);
criterion_main!(benches);
