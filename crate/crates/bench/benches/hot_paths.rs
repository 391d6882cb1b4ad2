//! Criterion benchmarks for the throughput-critical paths: network
//! forward/backward, environment stepping, and the feature pipeline.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use rand::Rng;
use rand::SeedableRng;
use rand_pcg::Pcg64;

use fxlab_core::agent::{
    ddqn_targets, train_step, Adam, AdamConfig, QNetwork, ReplayBuffer, Transition,
};
use fxlab_core::data::{self, FeatureConfig, SynthSpec};
use fxlab_core::env::{EnvConfig, EnvData, TradingEnv};
use fxlab_core::eval::{compute_metrics, EquityCurve};
use fxlab_core::reward::RewardConfig;

fn release_net(rng: &mut Pcg64) -> QNetwork {
    QNetwork::new(476, &[512, 512, 256], 10, rng).unwrap()
}

fn fill_replay(rng: &mut Pcg64, n: usize) -> ReplayBuffer {
    let mut replay = ReplayBuffer::new(n);
    for _ in 0..n {
        let mask: Vec<bool> = std::iter::once(true).chain((1..10).map(|_| rng.gen())).collect();
        let legal: Vec<usize> =
            mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        replay.push(Transition {
            s: (0..476).map(|_| rng.gen::<f64>() - 0.5).collect(),
            a: legal[rng.gen_range(0..legal.len())],
            r: rng.gen::<f64>() - 0.5,
            s_next: (0..476).map(|_| rng.gen::<f64>() - 0.5).collect(),
            done: rng.gen::<f64>() < 0.02,
            mask: mask.clone().into_boxed_slice(),
            mask_next: mask.into_boxed_slice(),
        });
    }
    replay
}

fn bench_network(c: &mut Criterion) {
    let mut rng = Pcg64::seed_from_u64(1);
    let net = release_net(&mut rng);
    let x: Vec<f64> = (0..476).map(|_| rng.gen::<f64>() - 0.5).collect();
    c.bench_function("q_forward_single", |b| {
        b.iter(|| net.forward(&x).unwrap());
    });

    let replay = fill_replay(&mut rng, 1024);
    let mut sample_rng = Pcg64::seed_from_u64(2);
    let target = net.clone();
    let mut group = c.benchmark_group("learn");
    group.sample_size(10);
    group.throughput(Throughput::Elements(128));
    group.bench_function("ddqn_train_step_b128", |b| {
        b.iter_batched(
            || {
                let batch: Vec<&Transition> =
                    replay.sample(128, &mut sample_rng).unwrap();
                let targets = ddqn_targets(&batch, &net, &target, 0.99).unwrap();
                (net.clone(), Adam::new(AdamConfig::default(), net.n_params()), batch, targets)
            },
            |(mut online, mut opt, batch, targets)| {
                train_step(&mut online, &mut opt, &batch, &targets, 1.0, 10.0).unwrap()
            },
            BatchSize::LargeInput,
        );
    });
    group.finish();
}

fn bench_env(c: &mut Criterion) {
    let bars = data::generate_synthetic(&SynthSpec::default(), 2_000, 3).unwrap();
    let prepared = data::prepare(&bars, 1.0, &FeatureConfig::default(), false).unwrap();
    let env_data = Arc::new(EnvData::from_prepared(&prepared).unwrap());
    c.bench_function("env_step_hold", |b| {
        let mut env =
            TradingEnv::new(EnvConfig::default(), RewardConfig::default(), env_data.clone(), 1)
                .unwrap();
        env.reset().unwrap();
        b.iter(|| {
            if env.is_done() {
                env.reset().unwrap();
            }
            env.step(0).unwrap()
        });
    });
}

fn bench_features(c: &mut Criterion) {
    let bars = data::generate_synthetic(&SynthSpec::default(), 5_000, 4).unwrap();
    let cfg = FeatureConfig::default();
    let mut group = c.benchmark_group("features");
    group.throughput(Throughput::Elements(bars.len() as u64));
    group.bench_function("pipeline_5000_bars", |b| {
        b.iter(|| data::prepare(&bars, 0.8, &cfg, false).unwrap());
    });
    group.finish();
}

fn bench_metrics(c: &mut Criterion) {
    let t0 = chrono::DateTime::parse_from_rfc3339("2022-01-03T00:00:00Z")
        .unwrap()
        .with_timezone(&chrono::Utc);
    let mut curve = EquityCurve::new(t0, 100_000.0);
    let mut rng = Pcg64::seed_from_u64(5);
    let mut equity = 100_000.0;
    for i in 1..50_000 {
        equity *= 1.0 + (rng.gen::<f64>() - 0.5) * 1e-4;
        curve.push(t0 + chrono::Duration::hours(i), equity);
    }
    c.bench_function("metrics_50k_points", |b| {
        b.iter(|| compute_metrics(&curve, &[], &[]));
    });
}

criterion_group!(benches, bench_network, bench_env, bench_features, bench_metrics);
criterion_main!(benches);
