//! High-pass filtering, unit segmentation, per-unit power spectra and
//! principal-frequency extraction.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::signal::{ms_to_samples, SampledSignal};

/// Second-order section, transposed direct form II.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    fn highpass(cutoff_hz: f64, fs: f64, q: f64) -> Self {
        let w0 = 2.0 * PI * cutoff_hz / fs;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * q);
        let a0 = 1.0 + alpha;
        Self {
            b0: (1.0 + cos) / 2.0 / a0,
            b1: -(1.0 + cos) / a0,
            b2: (1.0 + cos) / 2.0 / a0,
            a1: -2.0 * cos / a0,
            a2: (1.0 - alpha) / a0,
        }
    }

    fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }

    /// State that makes a constant input `u` a fixed point.
    fn steady_state(&self, u: f64) -> [f64; 2] {
        let y = self.dc_gain() * u;
        [
            (self.b1 + self.b2) * u - (self.a1 + self.a2) * y,
            self.b2 * u - self.a2 * y,
        ]
    }

    fn run(&self, data: &mut [f64], mut z: [f64; 2]) {
        for x in data.iter_mut() {
            let input = *x;
            let y = self.b0 * input + z[0];
            z[0] = self.b1 * input - self.a1 * y + z[1];
            z[1] = self.b2 * input - self.a2 * y;
            *x = y;
        }
    }
}

/// 4th-order Butterworth high-pass as two cascaded biquads (bilinear
/// transform, cutoff prewarped).
pub fn butterworth_highpass(cutoff_hz: f64, fs: f64) -> [Biquad; 2] {
    // pole-pair quality factors of a 4th-order Butterworth prototype
    let q1 = 1.0 / (2.0 * (PI / 8.0).cos());
    let q2 = 1.0 / (2.0 * (3.0 * PI / 8.0).cos());
    [
        Biquad::highpass(cutoff_hz, fs, q1),
        Biquad::highpass(cutoff_hz, fs, q2),
    ]
}

fn run_cascade(sections: &[Biquad], data: &mut [f64]) {
    let Some(&first) = data.first() else { return };
    let mut u = first;
    for s in sections {
        s.run(data, s.steady_state(u));
        u *= s.dc_gain();
    }
}

/// Zero-phase 4th-order Butterworth high-pass (filtered forward then
/// backward). Output length equals input length.
pub fn high_pass(signal: &SampledSignal, cutoff_hz: f64) -> Result<SampledSignal> {
    let fs = signal.sample_rate_hz;
    if !(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0) {
        return Err(Error::invalid(format!(
            "high-pass cutoff {cutoff_hz} Hz outside (0, {}) Hz",
            fs / 2.0
        )));
    }
    signal.require_non_empty()?;
    let sections = butterworth_highpass(cutoff_hz, fs);
    let x = &signal.samples;
    let n = x.len();

    // odd extension at both ends, long enough to cover several periods of
    // the cutoff
    let pad = (6.0 * (fs / cutoff_hz).ceil()) as usize;
    let pad = pad.min(n - 1);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

    run_cascade(&sections, &mut ext);
    ext.reverse();
    run_cascade(&sections, &mut ext);
    ext.reverse();

    SampledSignal::new(ext[pad..pad + n].to_vec(), fs)
}

/// Split into consecutive non-overlapping units of `floor(unit_ms * fs /
/// 1000)` samples; a trailing partial unit is dropped.
pub fn segment_units(signal: &SampledSignal, unit_ms: f64) -> Result<Vec<SampledSignal>> {
    if !(unit_ms > 0.0) {
        return Err(Error::invalid(format!("unit length must be positive, got {unit_ms} ms")));
    }
    let unit_len = ms_to_samples(unit_ms, signal.sample_rate_hz);
    if unit_len == 0 || signal.len() < unit_len {
        return Err(Error::TooShort {
            needed: unit_len.max(1),
            available: signal.len(),
        });
    }
    Ok(signal
        .samples
        .chunks_exact(unit_len)
        .map(|c| SampledSignal {
            samples: c.to_vec(),
            sample_rate_hz: signal.sample_rate_hz,
        })
        .collect())
}

/// One-sided power spectrum of a single analysis unit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSpectrum {
    pub unit_index: usize,
    pub bin_freqs_hz: Vec<f64>,
    pub power: Vec<f64>,
    /// Length of the unit before zero padding.
    pub unit_len: usize,
    pub fft_len: usize,
    pub sample_rate_hz: f64,
}

impl UnitSpectrum {
    /// Spacing of the (zero-padded) FFT bins.
    pub fn bin_width_hz(&self) -> f64 {
        self.sample_rate_hz / self.fft_len as f64
    }

    /// Native frequency resolution of the unpadded unit.
    pub fn resolution_hz(&self) -> f64 {
        self.sample_rate_hz / self.unit_len as f64
    }

    pub fn nyquist_hz(&self) -> f64 {
        self.sample_rate_hz / 2.0
    }
}

/// Zero-padded FFT length: four times the next power of two.
pub fn fft_len_for(unit_len: usize) -> usize {
    4 * unit_len.max(1).next_power_of_two()
}

/// Periodic Hann window.
pub fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos()))
        .collect()
}

/// Hann-windowed, zero-padded power spectrum.
///
/// Power is scaled one-sided so that the bins sum to the energy of the
/// windowed unit: `|X_k|^2 / N`, doubled for bins other than DC and Nyquist.
pub fn power_spectrum(unit: &SampledSignal) -> Result<UnitSpectrum> {
    power_spectrum_indexed(unit, 0)
}

pub fn power_spectrum_indexed(unit: &SampledSignal, unit_index: usize) -> Result<UnitSpectrum> {
    unit.require_non_empty()?;
    let n = unit.len();
    let fft_len = fft_len_for(n);
    let window = hann(n);
    let mut buf: Vec<Complex<f64>> = unit
        .samples
        .iter()
        .zip(&window)
        .map(|(x, w)| Complex::new(x * w, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(fft_len)
        .collect();
    FftPlanner::new().plan_fft_forward(fft_len).process(&mut buf);

    let half = fft_len / 2;
    let scale = 1.0 / fft_len as f64;
    let power = buf[..=half]
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let p = c.norm_sqr() * scale;
            if k == 0 || k == half {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    let fs = unit.sample_rate_hz;
    let bin_freqs_hz = (0..=half).map(|k| k as f64 * fs / fft_len as f64).collect();
    Ok(UnitSpectrum {
        unit_index,
        bin_freqs_hz,
        power,
        unit_len: n,
        fft_len,
        sample_rate_hz: fs,
    })
}

/// A principal frequency and the power of the spectral maximum it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64)", into = "(f64, f64)")]
pub struct Peak {
    pub freq_hz: f64,
    pub power: f64,
}

impl From<(f64, f64)> for Peak {
    fn from((freq_hz, power): (f64, f64)) -> Self {
        Self { freq_hz, power }
    }
}

impl From<Peak> for (f64, f64) {
    fn from(p: Peak) -> Self {
        (p.freq_hz, p.power)
    }
}

/// Up to `k` principal frequencies of one unit, strongest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub unit_index: usize,
    pub peaks: Vec<Peak>,
    #[serde(skip)]
    pub k: usize,
}

/// JSON document holding the principal frequencies of every unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub units: Vec<PeakSet>,
}

impl PeakReport {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut report: PeakReport = serde_json::from_str(text)?;
        for set in &mut report.units {
            set.k = set.k.max(set.peaks.len());
        }
        Ok(report)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Separation used when none is configured: two bins of the unit's native
/// resolution, which keeps leakage shoulders of one tone from being picked
/// as separate peaks.
pub fn default_min_sep_hz(unit_len: usize, fs: f64) -> f64 {
    2.0 * fs / unit_len as f64
}

/// Frequency offset (in bins, within ±0.5) of the vertex of the parabola
/// through three neighbouring values.
fn parabolic_offset(left: f64, mid: f64, right: f64) -> f64 {
    let denom = left - 2.0 * mid + right;
    if denom == 0.0 {
        return 0.0;
    }
    (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
}

/// Refined frequency of the local maximum at bin `i`, from a parabola fitted
/// to the log power of bins `i-1..=i+1`.
pub fn refine_peak(spec: &UnitSpectrum, i: usize) -> f64 {
    let p = &spec.power;
    let width = spec.bin_width_hz();
    if i == 0 || i + 1 >= p.len() {
        return spec.bin_freqs_hz[i];
    }
    let delta = if p[i - 1] > 0.0 && p[i + 1] > 0.0 {
        parabolic_offset(p[i - 1].ln(), p[i].ln(), p[i + 1].ln())
    } else {
        parabolic_offset(p[i - 1], p[i], p[i + 1])
    };
    (i as f64 + delta) * width
}

/// Indices of interior strict local maxima (plateaus count once, at their
/// left edge) with positive power.
pub fn local_maxima(power: &[f64]) -> Vec<usize> {
    (1..power.len().saturating_sub(1))
        .filter(|&i| power[i] > 0.0 && power[i] > power[i - 1] && power[i] >= power[i + 1])
        .collect()
}

/// Greedy selection of the `k` strongest local maxima inside `band_hz`, each
/// at least `min_sep_hz` away from every peak already chosen. Equal powers
/// resolve toward the lower frequency.
pub fn extract_principal(
    spec: &UnitSpectrum,
    k: usize,
    band_hz: (f64, f64),
    min_sep_hz: f64,
) -> Result<PeakSet> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let (lo, hi) = band_hz;
    if !(lo >= 0.0 && lo < hi && hi <= spec.nyquist_hz() + 1e-9) {
        return Err(Error::invalid(format!(
            "empty or out-of-range band [{lo}, {hi}] Hz (Nyquist {})",
            spec.nyquist_hz()
        )));
    }
    if !(min_sep_hz >= 0.0) {
        return Err(Error::invalid("min_sep_hz must be non-negative"));
    }

    let mut candidates: Vec<Peak> = local_maxima(&spec.power)
        .into_iter()
        .map(|i| Peak {
            freq_hz: refine_peak(spec, i),
            power: spec.power[i],
        })
        .filter(|p| p.freq_hz >= lo && p.freq_hz <= hi)
        .collect();
    candidates.sort_by(|a, b| {
        b.power
            .total_cmp(&a.power)
            .then(a.freq_hz.total_cmp(&b.freq_hz))
    });

    let mut peaks: Vec<Peak> = Vec::with_capacity(k);
    for c in candidates {
        if peaks.len() == k {
            break;
        }
        if peaks.iter().all(|p| (p.freq_hz - c.freq_hz).abs() >= min_sep_hz) {
            peaks.push(c);
        }
    }
    Ok(PeakSet {
        unit_index: spec.unit_index,
        peaks,
        k,
    })
}

/// Full analysis chain: high-pass, segment, spectrum and peak extraction
/// for every unit.
pub fn analyze(signal: &SampledSignal, cfg: &PipelineConfig) -> Result<Vec<PeakSet>> {
    let filtered = high_pass(signal, cfg.hpf_cutoff_hz)?;
    let units = segment_units(&filtered, cfg.unit_ms)?;
    let unit_len = units[0].len();
    let min_sep = cfg
        .min_sep_hz
        .unwrap_or_else(|| default_min_sep_hz(unit_len, signal.sample_rate_hz));
    let band = cfg.band_for(signal.sample_rate_hz);
    units
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let spec = power_spectrum_indexed(u, i)?;
            extract_principal(&spec, cfg.k, band, min_sep)
        })
        .collect()
}
