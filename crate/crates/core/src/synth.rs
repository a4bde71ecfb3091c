//! Superposed-sinusoid tactile pattern synthesis.
//!
//! Each analysis unit's principal frequencies become one sub-pattern: a sum
//! of sinusoids whose amplitudes follow the unit's power ratios and are
//! multiplied by the actuator weight. Sub-patterns are concatenated into a
//! loop with short crossfades at every boundary, including loop end to
//! start.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::actuator::ActuatorProfile;
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::signal::{ms_to_samples, SampledSignal};
use crate::spectral::{default_min_sep_hz, PeakSet};

/// How a peak's power ratio (relative to the strongest peak of its unit)
/// becomes a drive amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeMapping {
    Linear,
    /// Amplitude ∝ sqrt(power ratio), preserving relative energy.
    #[default]
    Sqrt,
}

impl AmplitudeMapping {
    fn apply(self, ratio: f64) -> f64 {
        match self {
            AmplitudeMapping::Linear => ratio,
            AmplitudeMapping::Sqrt => ratio.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub sub_duration_ms: f64,
    pub mapping: AmplitudeMapping,
    pub crossfade_ms: f64,
    /// Components of adjacent sub-patterns closer than this continue each
    /// other's phase. Two native analysis bins when `None`.
    pub continuity_hz: Option<f64>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self::from_config(&PipelineConfig::default())
    }
}

impl SynthOptions {
    pub fn from_config(cfg: &PipelineConfig) -> Self {
        Self {
            sub_duration_ms: cfg.unit_ms,
            mapping: cfg.amplitude_mapping,
            crossfade_ms: cfg.crossfade_ms,
            continuity_hz: cfg.min_sep_hz,
        }
    }
}

/// One sinusoid of a sub-pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64, f64)", into = "(f64, f64, f64)")]
pub struct Component {
    pub freq_hz: f64,
    pub amplitude: f64,
    pub phase_rad: f64,
}

impl From<(f64, f64, f64)> for Component {
    fn from((freq_hz, amplitude, phase_rad): (f64, f64, f64)) -> Self {
        Self {
            freq_hz,
            amplitude,
            phase_rad,
        }
    }
}

impl From<Component> for (f64, f64, f64) {
    fn from(c: Component) -> Self {
        (c.freq_hz, c.amplitude, c.phase_rad)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubPattern {
    pub components: Vec<Component>,
}

impl SubPattern {
    fn sample(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.amplitude * (TAU * c.freq_hz * t + c.phase_rad).sin())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TactilePattern {
    pub sub_patterns: Vec<SubPattern>,
    pub sub_duration_ms: f64,
    /// Samples per sub-pattern.
    pub sub_len: usize,
    pub waveform: SampledSignal,
    pub sample_rate_hz: f64,
}

/// Serializable description of a pattern (the waveform is exported
/// separately as WAV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternDescription {
    pub sample_rate_hz: f64,
    pub sub_duration_ms: f64,
    pub sub_len: usize,
    pub total_samples: usize,
    pub sub_patterns: Vec<SubPattern>,
}

impl TactilePattern {
    pub fn len(&self) -> usize {
        self.waveform.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waveform.is_empty()
    }

    pub fn duration_ms(&self) -> f64 {
        self.waveform.duration_s() * 1000.0
    }

    /// Samples of sub-pattern `i` within the waveform.
    pub fn sub_pattern_samples(&self, i: usize) -> &[f64] {
        &self.waveform.samples[i * self.sub_len..(i + 1) * self.sub_len]
    }

    pub fn description(&self) -> PatternDescription {
        PatternDescription {
            sample_rate_hz: self.sample_rate_hz,
            sub_duration_ms: self.sub_duration_ms,
            sub_len: self.sub_len,
            total_samples: self.waveform.len(),
            sub_patterns: self.sub_patterns.clone(),
        }
    }
}

fn validate_peak_sets(peak_sets: &[PeakSet]) -> Result<()> {
    if peak_sets.is_empty() {
        return Err(Error::invalid("no peak sets to synthesize"));
    }
    for set in peak_sets {
        if set.peaks.is_empty() {
            return Err(Error::invalid(format!("unit {} has no peaks", set.unit_index)));
        }
        for p in &set.peaks {
            if !(p.freq_hz.is_finite() && p.freq_hz > 0.0) {
                return Err(Error::invalid(format!(
                    "unit {}: invalid frequency {}",
                    set.unit_index, p.freq_hz
                )));
            }
            if !(p.power.is_finite() && p.power >= 0.0) {
                return Err(Error::invalid(format!(
                    "unit {}: invalid power {}",
                    set.unit_index, p.power
                )));
            }
        }
        if set.peaks.iter().all(|p| p.power == 0.0) {
            return Err(Error::invalid(format!("unit {}: all peak powers are zero", set.unit_index)));
        }
    }
    Ok(())
}

/// Amplitudes before global normalization; phases are assigned later.
fn unit_components(
    set: &PeakSet,
    profile: &ActuatorProfile,
    mapping: AmplitudeMapping,
) -> Result<Vec<Component>> {
    let max_power = set.peaks.iter().map(|p| p.power).fold(0.0, f64::max);
    set.peaks
        .iter()
        .map(|p| {
            Ok(Component {
                freq_hz: p.freq_hz,
                amplitude: profile.weight(p.freq_hz)? * mapping.apply(p.power / max_power),
                phase_rad: 0.0,
            })
        })
        .collect()
}

/// Give each component the running phase of the closest component of the
/// previous sub-pattern within `tolerance_hz`, or zero if none.
fn assign_phases(subs: &mut [SubPattern], sub_len: usize, fs: f64, tolerance_hz: f64) {
    let dur = sub_len as f64 / fs;
    for u in 1..subs.len() {
        let (done, rest) = subs.split_at_mut(u);
        let prev = &done[u - 1].components;
        let mut taken = vec![false; prev.len()];
        for c in rest[0].components.iter_mut() {
            let nearest = prev
                .iter()
                .enumerate()
                .filter(|(j, p)| !taken[*j] && (p.freq_hz - c.freq_hz).abs() < tolerance_hz)
                .min_by(|a, b| {
                    (a.1.freq_hz - c.freq_hz)
                        .abs()
                        .total_cmp(&(b.1.freq_hz - c.freq_hz).abs())
                });
            c.phase_rad = match nearest {
                Some((j, p)) => {
                    taken[j] = true;
                    (p.phase_rad + TAU * p.freq_hz * dur).rem_euclid(TAU)
                }
                None => 0.0,
            };
        }
    }
}

/// Build the looping pattern, one sub-pattern per peak set in order.
pub fn build_pattern(
    peak_sets: &[PeakSet],
    profile: &ActuatorProfile,
    fs: f64,
    opts: &SynthOptions,
) -> Result<TactilePattern> {
    validate_peak_sets(peak_sets)?;
    if !(fs > 0.0) {
        return Err(Error::invalid("sample rate must be positive"));
    }
    let sub_len = ms_to_samples(opts.sub_duration_ms, fs);
    if sub_len == 0 {
        return Err(Error::invalid("sub-pattern shorter than one sample"));
    }
    let tolerance = opts
        .continuity_hz
        .unwrap_or_else(|| default_min_sep_hz(sub_len, fs));

    let mut subs = peak_sets
        .iter()
        .map(|set| {
            Ok(SubPattern {
                components: unit_components(set, profile, opts.mapping)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    assign_phases(&mut subs, sub_len, fs, tolerance);

    // each sub-pattern is rendered past its end so the tail can fade into
    // the head of the next one
    let xfade = ((opts.crossfade_ms * fs / 1000.0).round() as usize).min(sub_len);
    let rendered: Vec<Vec<f64>> = subs
        .iter()
        .map(|s| (0..sub_len + xfade).map(|i| s.sample(i as f64 / fs)).collect())
        .collect();

    let count = subs.len();
    let mut out = Vec::with_capacity(count * sub_len);
    for r in &rendered {
        out.extend_from_slice(&r[..sub_len]);
    }
    for (u, tail) in rendered.iter().enumerate() {
        let next = (u + 1) % count;
        for i in 0..xfade {
            let r = (i + 1) as f64 / (xfade + 1) as f64;
            out[next * sub_len + i] = (1.0 - r) * tail[sub_len + i] + r * rendered[next][i];
        }
    }

    let peak = out.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak == 0.0 {
        return Err(Error::invalid("synthesized pattern is silent"));
    }
    for s in &mut out {
        *s /= peak;
    }
    for sub in &mut subs {
        for c in &mut sub.components {
            c.amplitude /= peak;
        }
    }

    Ok(TactilePattern {
        sub_patterns: subs,
        sub_duration_ms: opts.sub_duration_ms,
        sub_len,
        waveform: SampledSignal::new(out, fs)?,
        sample_rate_hz: fs,
    })
}

/// Choose which analysed units feed the pattern's `slots` sub-pattern
/// positions: the `distinct` units from the middle of the recording (edges
/// are the least consistent), each repeated over an equal block of slots.
/// `distinct == 1` yields the non-fluctuating pattern.
pub fn arrange_units(peak_sets: &[PeakSet], distinct: usize, slots: usize) -> Result<Vec<PeakSet>> {
    if peak_sets.is_empty() {
        return Err(Error::invalid("no peak sets"));
    }
    if distinct == 0 || slots == 0 || distinct > slots {
        return Err(Error::invalid(format!(
            "cannot place {distinct} distinct sub-patterns in {slots} slots"
        )));
    }
    let take = distinct.min(peak_sets.len());
    let start = (peak_sets.len() - take) / 2;
    let chosen = &peak_sets[start..start + take];
    Ok((0..slots).map(|i| chosen[i * take / slots].clone()).collect())
}

/// Configured end-to-end synthesis: arrange units then build.
pub fn synthesize(
    peak_sets: &[PeakSet],
    profile: &ActuatorProfile,
    fs: f64,
    cfg: &PipelineConfig,
) -> Result<TactilePattern> {
    let arranged = arrange_units(peak_sets, cfg.sub_patterns, cfg.pattern_units())?;
    build_pattern(&arranged, profile, fs, &SynthOptions::from_config(cfg))
}

/// The pattern repeated back to back.
pub fn render_loop(pattern: &TactilePattern, repeats: usize) -> Result<SampledSignal> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be at least 1"));
    }
    SampledSignal::new(pattern.waveform.samples.repeat(repeats), pattern.sample_rate_hz)
}
