use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use thabound_core::rate::{key_rate, mu_out_threshold, sweep_distance, RateQuery};
use thabound_core::{AttackKind, AttackModel, ChannelParams, SourceModel};

fn single_point(c: &mut Criterion) {
    let mut group = c.benchmark_group("key_rate");
    for (name, source) in [
        ("single_photon", SourceModel::SinglePhoton),
        ("decoy", SourceModel::Decoy { signal_mean: 0.5 }),
    ] {
        let q = RateQuery {
            channel: ChannelParams::standard(),
            source,
            attack: AttackModel::general(1e-6).unwrap(),
            length_km: 100.0,
        };
        group.bench_function(name, |b| b.iter(|| key_rate(black_box(&q))));
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let ch = ChannelParams::standard();
    let attack = AttackModel::general(1e-6).unwrap();
    c.bench_function("sweep_0_200_step_0.1", |b| {
        b.iter(|| {
            sweep_distance(
                &ch,
                &SourceModel::SinglePhoton,
                black_box(&attack),
                0.0,
                200.0,
                0.1,
            )
        })
    });
}

fn threshold(c: &mut Criterion) {
    let ch = ChannelParams::standard();
    c.bench_function("threshold_general", |b| {
        b.iter(|| {
            mu_out_threshold(
                &ch,
                &SourceModel::SinglePhoton,
                black_box(AttackKind::General),
            )
        })
    });
}

criterion_group!(benches, single_point, sweep, threshold);
criterion_main!(benches);
