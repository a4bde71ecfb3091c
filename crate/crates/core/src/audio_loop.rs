//! Loop-point search for recorded friction sound, and peak equalization of
//! the resulting auditory patterns.

use serde::{Deserialize, Serialize};

use crate::config::{PipelineConfig, DEFAULT_AUDIO_WINDOW_MS, DEFAULT_LOOP_GUARD_MS};
use crate::error::{Error, Result};
use crate::signal::{ms_to_samples, peak_abs, SampledSignal};

/// A window of the source chosen for looping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopSegment {
    pub start_sample: usize,
    pub length_samples: usize,
    /// Mismatch of the best scan candidate (before zero-crossing snap).
    pub mismatch_score: f64,
    /// Candidate start that won the scan; `start_sample` is this snapped to
    /// a rising zero crossing.
    #[serde(skip)]
    pub scan_start: usize,
}

impl LoopSegment {
    pub fn extract(&self, audio: &SampledSignal) -> SampledSignal {
        audio.slice(self.start_sample, self.length_samples)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopParams {
    pub window_ms: f64,
    /// Excluded margin at both ends of the recording.
    pub guard_ms: f64,
    pub stride_ms: f64,
    /// Length of the head/tail sub-windows compared by correlation.
    pub boundary_ms: f64,
    /// Length of the head/tail sub-windows compared by RMS.
    pub level_ms: f64,
    /// Weight of the waveform (correlation) term.
    pub alpha: f64,
    /// Weight of the level (RMS) term.
    pub beta: f64,
}

impl Default for LoopParams {
    fn default() -> Self {
        Self {
            window_ms: DEFAULT_AUDIO_WINDOW_MS,
            guard_ms: DEFAULT_LOOP_GUARD_MS,
            stride_ms: 1.0,
            boundary_ms: 10.0,
            level_ms: 30.0,
            alpha: 0.5,
            beta: 0.5,
        }
    }
}

impl LoopParams {
    pub fn from_config(cfg: &PipelineConfig) -> Self {
        Self {
            window_ms: cfg.audio_window_ms,
            guard_ms: cfg.loop_guard_ms,
            ..Self::default()
        }
    }
}

/// Sample counts derived from [`LoopParams`] at a given rate.
#[derive(Debug, Clone, Copy)]
struct Lengths {
    window: usize,
    guard: usize,
    stride: usize,
    boundary: usize,
    level: usize,
}

impl Lengths {
    fn new(p: &LoopParams, fs: f64) -> Result<Self> {
        let window = ms_to_samples(p.window_ms, fs);
        let boundary = ms_to_samples(p.boundary_ms, fs).max(1);
        let level = ms_to_samples(p.level_ms, fs).max(1);
        if window == 0 || boundary > window || level > window {
            return Err(Error::invalid(format!(
                "loop window of {} ms too short for its boundary sub-windows",
                p.window_ms
            )));
        }
        Ok(Self {
            window,
            guard: ms_to_samples(p.guard_ms, fs),
            stride: ms_to_samples(p.stride_ms, fs).max(1),
            boundary,
            level,
        })
    }
}

/// Running sums of squares for O(1) window energy.
struct EnergyIndex(Vec<f64>);

impl EnergyIndex {
    fn new(x: &[f64]) -> Self {
        let mut acc = Vec::with_capacity(x.len() + 1);
        acc.push(0.0);
        let mut s = 0.0;
        for v in x {
            s += v * v;
            acc.push(s);
        }
        Self(acc)
    }

    fn rms(&self, start: usize, len: usize) -> f64 {
        ((self.0[start + len] - self.0[start]).max(0.0) / len as f64).sqrt()
    }
}

fn normalized_correlation(a: &[f64], b: &[f64]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        0.0
    } else {
        ab / (aa * bb).sqrt()
    }
}

/// Requires `boundary` samples of source after the window: the head of the
/// window is compared with what the source plays right after its end, which
/// is what the head replaces when the window wraps.
fn score_at(x: &[f64], energy: &EnergyIndex, start: usize, l: &Lengths, p: &LoopParams) -> f64 {
    let end = start + l.window;
    let ncc = normalized_correlation(&x[start..start + l.boundary], &x[end..end + l.boundary]);
    let total = energy.rms(start, l.window);
    let level = if total == 0.0 {
        0.0
    } else {
        let head = energy.rms(start, l.level);
        let tail = energy.rms(start + l.window - l.level, l.level);
        (head - tail).abs() / total
    };
    p.alpha * (1.0 - ncc) + p.beta * level
}

/// Mismatch of the window starting at `start`: weighted sum of how poorly
/// the window's head matches the source's continuation past its end
/// (1 − normalized correlation) and the relative level difference between
/// the window's head and tail.
pub fn mismatch_score(audio: &SampledSignal, start: usize, params: &LoopParams) -> Result<f64> {
    let l = Lengths::new(params, audio.sample_rate_hz)?;
    if start + l.window + l.boundary > audio.len() {
        return Err(Error::invalid("window and its continuation extend past the end of the audio"));
    }
    let energy = EnergyIndex::new(&audio.samples);
    Ok(score_at(&audio.samples, &energy, start, &l, params))
}

/// Scan starts at `stride_ms` steps inside the guard margins (the trailing
/// margin is at least one boundary sub-window) and keep the
/// lowest mismatch (earliest on ties), then snap it to the nearest rising
/// zero crossing.
pub fn find_loop(audio: &SampledSignal, params: &LoopParams) -> Result<LoopSegment> {
    let l = Lengths::new(params, audio.sample_rate_hz)?;
    let tail = l.guard.max(l.boundary);
    let needed = l.guard + l.window + tail;
    if audio.len() < needed {
        return Err(Error::TooShort {
            needed,
            available: audio.len(),
        });
    }
    let x = &audio.samples;
    let energy = EnergyIndex::new(x);
    let last = x.len() - l.window - tail;

    let mut best = (l.guard, f64::INFINITY);
    for start in (l.guard..=last).step_by(l.stride) {
        let s = score_at(x, &energy, start, &l, params);
        if s < best.1 {
            best = (start, s);
        }
    }
    let (scan_start, mismatch_score) = best;
    let start_sample = snap_to_rising_zero(x, scan_start, l.boundary, x.len() - l.window);
    Ok(LoopSegment {
        start_sample,
        length_samples: l.window,
        mismatch_score,
        scan_start,
    })
}

/// Nearest index `i` within `radius` of `from` with `x[i-1] < 0 <= x[i]`,
/// not beyond `max_start`. Earlier wins ties; `from` if none exists.
fn snap_to_rising_zero(x: &[f64], from: usize, radius: usize, max_start: usize) -> usize {
    let rising = |i: usize| i >= 1 && i <= max_start && x[i - 1] < 0.0 && x[i] >= 0.0;
    for d in 0..=radius {
        if d <= from && rising(from - d) {
            return from - d;
        }
        if rising(from + d) {
            return from + d;
        }
    }
    from
}

/// Difference between the first sample of the loop and the sample the
/// source plays right after the window, relative to the source peak. This
/// is the discontinuity heard at the wrap.
pub fn boundary_jump(audio: &SampledSignal, seg: &LoopSegment) -> f64 {
    let x = &audio.samples;
    let after = seg.start_sample + seg.length_samples;
    let peak = peak_abs(x);
    if after >= x.len() || peak == 0.0 {
        return 0.0;
    }
    (x[seg.start_sample] - x[after]).abs() / peak
}

/// Scale every pattern to peak magnitude 1.0.
pub fn equalize_max_amplitude(patterns: &[SampledSignal]) -> Result<Vec<SampledSignal>> {
    patterns
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.peak() == 0.0 {
                Err(Error::invalid(format!("pattern {i} is silent")))
            } else {
                Ok(p.normalized())
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn sine(freq: f64, fs: f64, secs: f64) -> SampledSignal {
        SampledSignal::from_fn((fs * secs) as usize, fs, |t| (TAU * freq * t).sin()).unwrap()
    }

    #[test]
    fn pure_tone_loops_cleanly() {
        let audio = sine(440.0, 44100.0, 1.0);
        let seg = find_loop(&audio, &LoopParams::default()).unwrap();
        assert_eq!(seg.length_samples, 13230);
        assert!(seg.mismatch_score <= 1e-3, "score {}", seg.mismatch_score);
        assert!(boundary_jump(&audio, &seg) < 0.01);
        let x = &audio.samples;
        assert!(x[seg.start_sample - 1] < 0.0 && x[seg.start_sample] >= 0.0);
    }

    #[test]
    fn too_short_errors() {
        let audio = sine(440.0, 44100.0, 0.2);
        assert!(matches!(
            find_loop(&audio, &LoopParams { guard_ms: 0.0, ..Default::default() }),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn score_matches_public_scorer() {
        let audio = SampledSignal::from_fn(30000, 44100.0, |t| (TAU * 97.0 * t).sin() * (1.0 + t)).unwrap();
        let p = LoopParams { guard_ms: 10.0, ..Default::default() };
        let seg = find_loop(&audio, &p).unwrap();
        assert_eq!(seg.mismatch_score, mismatch_score(&audio, seg.scan_start, &p).unwrap());
    }

    #[test]
    fn silent_audio_scores_without_nan() {
        let audio = SampledSignal::new(vec![0.0; 20000], 44100.0).unwrap();
        let seg = find_loop(&audio, &LoopParams { guard_ms: 0.0, ..Default::default() }).unwrap();
        assert_eq!(seg.mismatch_score, 0.5);
        assert_eq!(seg.start_sample, 0);
    }

    #[test]
    fn equalize() {
        let a = SampledSignal::new(vec![0.5, -0.25], 100.0).unwrap();
        let b = SampledSignal::new(vec![0.1, -0.25, 0.2], 100.0).unwrap();
        let out = equalize_max_amplitude(&[a, b]).unwrap();
        assert_eq!(out[0].samples, vec![1.0, -0.5]);
        assert_eq!(out[1].samples, vec![0.4, -1.0, 0.8]);
        assert_eq!(equalize_max_amplitude(&out).unwrap(), out);
        let zero = SampledSignal::new(vec![0.0; 4], 100.0).unwrap();
        assert!(equalize_max_amplitude(&[out[0].clone(), zero]).is_err());
    }

    #[test]
    fn segment_json_fields() {
        let seg = LoopSegment { start_sample: 5, length_samples: 10, mismatch_score: 0.25, scan_start: 4 };
        assert_eq!(
            serde_json::to_string(&seg).unwrap(),
            r#"{"start_sample":5,"length_samples":10,"mismatch_score":0.25}"#
        );
    }
}
