//! Pipeline parameters and their JSON form.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::AmplitudeMapping;

/// Accelerometer sampling rate of the reference recordings.
pub const DEFAULT_FS_HZ: f64 = 1344.0;
/// Removes hand-motion artifacts below the friction band.
pub const DEFAULT_HPF_HZ: f64 = 30.0;
pub const DEFAULT_UNIT_MS: f64 = 100.0;
pub const DEFAULT_K: usize = 10;
pub const DEFAULT_SUB_PATTERNS: usize = 15;
pub const DEFAULT_PATTERN_MS: f64 = 1500.0;
/// Upper edge of the analysis band: limit of mechanoreceptor sensitivity.
pub const DEFAULT_BAND_HZ: (f64, f64) = (30.0, 500.0);
pub const DEFAULT_AUDIO_WINDOW_MS: f64 = 300.0;
pub const DEFAULT_LOOP_GUARD_MS: f64 = 100.0;
pub const DEFAULT_CROSSFADE_MS: f64 = 2.0;
pub const DEFAULT_MAX_BOOST: f64 = 10.0;
pub const DEFAULT_PORT: u16 = 8080;

/// Superposition / fluctuation settings compared when choosing the defaults.
/// `B` (ten frequencies, fifteen 100 ms sub-patterns) is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Condition {
    /// `(principal frequencies, sub-patterns)`.
    pub fn parameters(self) -> (usize, usize) {
        match self {
            Condition::A => (5, 15),
            Condition::B => (10, 15),
            Condition::C => (15, 15),
            Condition::D => (5, 1),
            Condition::E => (10, 1),
            Condition::F => (15, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Rate assumed for CSV input and used by the simulator.
    pub fs: f64,
    pub hpf_cutoff_hz: f64,
    pub unit_ms: f64,
    pub k: usize,
    /// Number of distinct sub-patterns (fluctuation).
    pub sub_patterns: usize,
    /// Nominal length of the looping tactile pattern.
    pub pattern_ms: f64,
    pub band: (f64, f64),
    /// Minimum spacing of principal frequencies; two native bins if unset.
    pub min_sep_hz: Option<f64>,
    pub amplitude_mapping: AmplitudeMapping,
    pub crossfade_ms: f64,
    pub max_boost: f64,
    /// Actuator response CSV; the built-in synthetic profile when unset.
    pub profile: Option<PathBuf>,
    pub audio_window_ms: f64,
    pub loop_guard_ms: f64,
    pub port: u16,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            fs: DEFAULT_FS_HZ,
            hpf_cutoff_hz: DEFAULT_HPF_HZ,
            unit_ms: DEFAULT_UNIT_MS,
            k: DEFAULT_K,
            sub_patterns: DEFAULT_SUB_PATTERNS,
            pattern_ms: DEFAULT_PATTERN_MS,
            band: DEFAULT_BAND_HZ,
            min_sep_hz: None,
            amplitude_mapping: AmplitudeMapping::Sqrt,
            crossfade_ms: DEFAULT_CROSSFADE_MS,
            max_boost: DEFAULT_MAX_BOOST,
            profile: None,
            audio_window_ms: DEFAULT_AUDIO_WINDOW_MS,
            loop_guard_ms: DEFAULT_LOOP_GUARD_MS,
            port: DEFAULT_PORT,
        }
    }
}

impl PipelineConfig {
    pub fn for_condition(condition: Condition) -> Self {
        let (k, sub_patterns) = condition.parameters();
        Self {
            k,
            sub_patterns,
            ..Self::default()
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(m.to_string()));
        if !(self.fs > 0.0) {
            return bad("fs must be positive");
        }
        if !(self.unit_ms > 0.0) {
            return bad("unit_ms must be positive");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.sub_patterns == 0 {
            return bad("sub_patterns must be at least 1");
        }
        if !(self.band.0 >= 0.0 && self.band.0 < self.band.1) {
            return bad("band must satisfy 0 <= lo < hi");
        }
        if !(self.max_boost >= 1.0) {
            return bad("max_boost must be >= 1");
        }
        if self.sub_patterns > self.pattern_units() {
            return bad("sub_patterns exceeds pattern_ms / unit_ms");
        }
        if !(self.crossfade_ms >= 0.0) {
            return bad("crossfade_ms must be non-negative");
        }
        Ok(())
    }

    /// Sub-pattern slots in one pattern (15 for 1500 ms of 100 ms units).
    pub fn pattern_units(&self) -> usize {
        ((self.pattern_ms / self.unit_ms).round() as usize).max(1)
    }

    /// Analysis band with the upper edge limited to Nyquist.
    pub fn band_for(&self, fs: f64) -> (f64, f64) {
        (self.band.0, self.band.1.min(fs / 2.0))
    }
}

/// Parse `lo:hi` (Hz).
pub fn parse_band(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("band {s:?} is not lo:hi")))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad band lower edge {lo:?}")))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad band upper edge {hi:?}")))?;
    if !(lo >= 0.0 && lo < hi) {
        return Err(Error::invalid(format!("empty band {lo}:{hi}")));
    }
    Ok((lo, hi))
}
