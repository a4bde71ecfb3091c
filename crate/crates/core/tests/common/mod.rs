//! Independent reference computations for integration tests. Nothing here
//! calls into the code paths it is used to check.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_noise(seed: u64, sigma: f64, n: usize) -> Vec<f64> {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    (0..n).map(|_| normal.sample(&mut r)).collect()
}

/// One-sided power of the Hann-windowed unit zero-padded to
/// `4 * next_pow2(n)`, by direct summation. Same scaling as the library:
/// `|X_k|^2 / N`, doubled away from DC and Nyquist.
pub fn brute_force_power(unit: &[f64], fs: f64) -> Vec<(f64, f64)> {
    let n = unit.len();
    let nfft = 4 * n.next_power_of_two();
    let windowed: Vec<f64> = unit
        .iter()
        .enumerate()
        .map(|(i, x)| x * 0.5 * (1.0 - (TAU * i as f64 / n as f64).cos()))
        .collect();
    (0..=nfft / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, x) in windowed.iter().enumerate() {
                let ang = -TAU * ((k * i) % nfft) as f64 / nfft as f64;
                re += x * ang.cos();
                im += x * ang.sin();
            }
            let mut p = (re * re + im * im) / nfft as f64;
            if k != 0 && k != nfft / 2 {
                p *= 2.0;
            }
            (k as f64 * fs / nfft as f64, p)
        })
        .collect()
}

/// Repeated global argmax over bins: each round takes the strongest bin
/// that is a local maximum inside the band and at least `min_sep` from all
/// earlier picks (lower frequency on ties).
pub fn exhaustive_argmax_peaks(
    spectrum: &[(f64, f64)],
    k: usize,
    band: (f64, f64),
    min_sep: f64,
) -> Vec<(f64, f64)> {
    let is_local_max = |i: usize| {
        i > 0
            && i + 1 < spectrum.len()
            && spectrum[i].1 > 0.0
            && spectrum[i].1 > spectrum[i - 1].1
            && spectrum[i].1 >= spectrum[i + 1].1
    };
    let mut picked: Vec<(f64, f64)> = Vec::new();
    while picked.len() < k {
        let mut best: Option<usize> = None;
        for i in 0..spectrum.len() {
            let (f, p) = spectrum[i];
            if f < band.0 || f > band.1 || !is_local_max(i) {
                continue;
            }
            if picked.iter().any(|&(g, _)| (g - f).abs() < min_sep) {
                continue;
            }
            if best.is_none_or(|b| p > spectrum[b].1) {
                best = Some(i);
            }
        }
        match best {
            Some(i) => picked.push(spectrum[i]),
            None => break,
        }
    }
    picked
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Least-squares amplitudes of sinusoids at known frequencies in `samples`,
/// where `samples[i]` is taken at `t = (offset + i) / fs`.
pub fn fit_amplitudes(samples: &[f64], offset: usize, fs: f64, freqs: &[f64]) -> Vec<f64> {
    let m = 2 * freqs.len();
    let basis = |i: usize, j: usize| {
        let t = (offset + i) as f64 / fs;
        let w = TAU * freqs[j / 2] * t;
        if j.is_multiple_of(2) {
            w.sin()
        } else {
            w.cos()
        }
    };
    let mut ata = vec![vec![0.0; m]; m];
    let mut atb = vec![0.0; m];
    for (i, &y) in samples.iter().enumerate() {
        let row: Vec<f64> = (0..m).map(|j| basis(i, j)).collect();
        for r in 0..m {
            atb[r] += row[r] * y;
            for c in 0..m {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    let coef = solve(ata, atb);
    coef.chunks(2).map(|c| c[0].hypot(c[1])).collect()
}

/// Loop mismatch recomputed from its definition: 0.5·(1 − NCC(head 10 ms,
/// 10 ms after the window)) + 0.5·|RMS(head 30 ms) − RMS(tail 30 ms)| /
/// RMS(window).
pub fn loop_score(x: &[f64], fs: f64, start: usize, window: usize) -> f64 {
    let b = (0.010 * fs + 1e-9).floor() as usize;
    let lv = (0.030 * fs + 1e-9).floor() as usize;
    let rms = |s: &[f64]| (s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64).sqrt();
    let head = &x[start..start + b];
    let after = &x[start + window..start + window + b];
    let dot: f64 = head.iter().zip(after).map(|(p, q)| p * q).sum();
    let nh: f64 = head.iter().map(|v| v * v).sum();
    let na: f64 = after.iter().map(|v| v * v).sum();
    let ncc = if nh == 0.0 || na == 0.0 { 0.0 } else { dot / (nh * na).sqrt() };
    let total = rms(&x[start..start + window]);
    let level = if total == 0.0 {
        0.0
    } else {
        (rms(&x[start..start + lv]) - rms(&x[start + window - lv..start + window])).abs() / total
    };
    0.5 * (1.0 - ncc) + 0.5 * level
}

/// Sum of sines `Σ a sin(2π f t + φ)`.
pub fn sines(components: &[(f64, f64, f64)], fs: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            components
                .iter()
                .map(|&(f, a, ph)| a * (2.0 * PI * f * t + ph).sin())
                .sum()
        })
        .collect()
}

/// Cosine distance between two non-negative vectors.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    1.0 - dot / (na * nb)
}
