use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use penfeel_bench::{peak_sets, tones};
use penfeel_core::audio_loop::{find_loop, LoopParams};
use penfeel_core::friction_sim::simulate;
use penfeel_core::spectral::{analyze, default_min_sep_hz, extract_principal, high_pass, power_spectrum};
use penfeel_core::synth::{build_pattern, SynthOptions};
use penfeel_core::{ActuatorProfile, PipelineConfig, SimConfig, TextureComponent};

const FS: f64 = 1344.0;

fn spectral(c: &mut Criterion) {
    let freqs = [55.0, 90.0, 140.0, 175.0, 230.0, 260.0, 310.0, 360.0, 410.0, 470.0];
    let unit = tones(&freqs, FS, 134);
    let recording = tones(&freqs, FS, 2016);
    let cfg = PipelineConfig::default();
    let spec = power_spectrum(&unit).unwrap();
    let min_sep = default_min_sep_hz(134, FS);

    c.bench_function("power_spectrum/134", |b| b.iter(|| power_spectrum(black_box(&unit)).unwrap()));
    c.bench_function("extract_principal/k10", |b| {
        b.iter(|| extract_principal(black_box(&spec), 10, cfg.band, min_sep).unwrap())
    });
    c.bench_function("high_pass/1.5s", |b| b.iter(|| high_pass(black_box(&recording), 30.0).unwrap()));
    c.bench_function("analyze/1.5s", |b| b.iter(|| analyze(black_box(&recording), &cfg).unwrap()));
}

fn synthesis(c: &mut Criterion) {
    let sets = peak_sets();
    let profile = ActuatorProfile::default_synthetic();
    let opts = SynthOptions::default();
    c.bench_function("build_pattern/15x10", |b| {
        b.iter(|| build_pattern(black_box(&sets), &profile, FS, &opts).unwrap())
    });
}

fn looping(c: &mut Criterion) {
    let audio = tones(&[220.0, 661.0, 1503.0], 44100.0, 66150);
    let params = LoopParams::default();
    c.bench_function("find_loop/1.5s@44.1k", |b| b.iter(|| find_loop(black_box(&audio), &params).unwrap()));
}

fn simulator(c: &mut Criterion) {
    let cfg = SimConfig {
        texture: vec![
            TextureComponent { spatial_freq_cycles_per_m: 2000.0, depth: 0.3, phase_rad: 0.0 },
            TextureComponent { spatial_freq_cycles_per_m: 5200.0, depth: 0.2, phase_rad: 1.0 },
        ],
        ..SimConfig::default()
    };
    c.bench_function("simulate/1.5s@1344", |b| b.iter(|| simulate(black_box(&cfg)).unwrap()));
}

criterion_group!(benches, spectral, synthesis, looping, simulator);
criterion_main!(benches);
