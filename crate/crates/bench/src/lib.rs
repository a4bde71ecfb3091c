//! Input fixtures shared by the benchmarks.

use std::f64::consts::TAU;

use penfeel_core::spectral::{Peak, PeakSet};
use penfeel_core::SampledSignal;

/// Sum of equal-amplitude tones sampled at `fs`.
pub fn tones(freqs: &[f64], fs: f64, len: usize) -> SampledSignal {
    SampledSignal::from_fn(len, fs, |t| freqs.iter().map(|f| (TAU * f * t).sin()).sum())
        .expect("positive rate")
        .normalized()
}

/// Fifteen units of ten peaks each, drifting slowly in frequency.
pub fn peak_sets() -> Vec<PeakSet> {
    (0..15)
        .map(|u| PeakSet {
            unit_index: u,
            peaks: (0..10)
                .map(|j| Peak {
                    freq_hz: 50.0 + 40.0 * j as f64 + u as f64,
                    power: 1.0 / (1.0 + j as f64),
                })
                .collect(),
            k: 10,
        })
        .collect()
}
