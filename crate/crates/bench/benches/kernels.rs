use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ofdmpa_core::mc_oracle::{knn_entropy, simulate_frames, FrameConfig, PaModel, KNN_K};
use ofdmpa_core::pa_models::pa_low;
use ofdmpa_core::pas_engine::{pas_frontier_with_tables, reference_pair, Duplex, PasConfig, PasTables, XiMode};
use ofdmpa_core::se_engine::{entropy_y, ChannelProfile, LinkScenario, DEFAULT_ENTROPY_TOL};
use ofdmpa_core::specfun::{lambert_w, marcum_q1, WBranch};

fn special_functions(c: &mut Criterion) {
    let pts: Vec<(f64, f64)> = (0..64).map(|i| (0.5 * i as f64, 0.4 * i as f64 + 0.1)).collect();
    c.bench_function("marcum_q1 x64", |b| {
        b.iter(|| pts.iter().map(|&(a, x)| marcum_q1(black_box(a), black_box(x)).unwrap()).sum::<f64>())
    });
    let qs: Vec<f64> = (0..64).map(|i| -0.36 + 0.005 * i as f64).collect();
    c.bench_function("lambert_w both branches x64", |b| {
        b.iter(|| {
            qs.iter()
                .map(|&q| {
                    let w0 = lambert_w(WBranch::Principal, black_box(q)).unwrap();
                    let w1 = if q < 0.0 { lambert_w(WBranch::LowerNegative, q).unwrap() } else { 0.0 };
                    w0 + w1
                })
                .sum::<f64>()
        })
    });
}

fn entropy(c: &mut Criterion) {
    let sc = LinkScenario::reference(&pa_low());
    let mut g = c.benchmark_group("entropy_y");
    g.sample_size(10);
    for xi in [0.05, 0.4] {
        g.bench_function(format!("xi={xi}"), |b| b.iter(|| entropy_y(black_box(xi), &sc, DEFAULT_ENTROPY_TOL).unwrap()));
    }
    g.finish();
}

fn knn(c: &mut Criterion) {
    let sc = LinkScenario::reference(&pa_low());
    let cfg = FrameConfig::for_samples(1 << 16, 256, 0, 5, PaModel::SoftLimiter).unwrap();
    let set = simulate_frames(&cfg, 0.2, &sc, &ChannelProfile::flat()).unwrap();
    let pts: Vec<[f64; 2]> = set.samples.iter().map(|y| [y.re, y.im]).collect();
    let mut g = c.benchmark_group("knn_entropy");
    g.sample_size(10);
    g.bench_function("65536 points", |b| b.iter(|| knn_entropy(black_box(&pts), KNN_K).unwrap()));
    g.finish();
}

fn frontier(c: &mut Criterion) {
    let (a, b) = reference_pair();
    let config = PasConfig::new(a, b, 1.0, 0.0, Duplex::Tdd).unwrap();
    let grid: Vec<f64> = (1..=60).map(|i| i as f64 / 100.0).collect();
    let tables = PasTables::build(&config, &grid).unwrap();
    let top = tables.pa2.se[tables.pa2.max_se_index()];
    let targets: Vec<f64> = (0..200).map(|i| top * i as f64 / 199.0).collect();
    let mut g = c.benchmark_group("pas_frontier");
    g.sample_size(10);
    for (name, mode) in [("shared", XiMode::Shared), ("per_pa", XiMode::PerPa)] {
        g.bench_function(name, |bch| bch.iter(|| pas_frontier_with_tables(black_box(&targets), &config, &tables, mode)));
    }
    g.finish();
}

criterion_group!(benches, special_functions, entropy, knn, frontier);
criterion_main!(benches);
