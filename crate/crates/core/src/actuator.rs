//! Actuator frequency response and the equalizing drive weight derived
//! from it.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::config::DEFAULT_MAX_BOOST;
use crate::error::{Error, Result};

const PROFILE_HEADER: &str = "# actuator-profile v1";

/// Tabulated output gain (displacement per unit drive) over frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorProfile {
    points: Vec<(f64, f64)>,
    max_boost: f64,
}

impl ActuatorProfile {
    pub fn new(points: Vec<(f64, f64)>, max_boost: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("actuator profile: ≥2 points required"));
        }
        for &(f, g) in &points {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::invalid(format!("actuator profile: non-positive frequency {f}")));
            }
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::invalid(format!(
                    "actuator profile: non-positive gain {g} at {f} Hz"
                )));
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid(format!(
                "actuator profile: frequencies not strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        if !(max_boost >= 1.0) {
            return Err(Error::invalid(format!("max_boost must be >= 1, got {max_boost}")));
        }
        Ok(Self { points, max_boost })
    }

    /// Unit gain at every frequency.
    pub fn flat() -> Self {
        Self {
            points: vec![(1.0, 1.0), (1.0e5, 1.0)],
            max_boost: DEFAULT_MAX_BOOST,
        }
    }

    /// Synthetic stand-in for a linear resonant actuator: a second-order
    /// band-pass magnitude with unit peak at `resonance_hz`, tabulated on a
    /// log grid from 20 Hz to 1 kHz. Not a measured device.
    pub fn synthetic_lra(resonance_hz: f64, q: f64, max_boost: f64) -> Result<Self> {
        if !(resonance_hz > 0.0 && q > 0.0) {
            return Err(Error::invalid("resonance and Q must be positive"));
        }
        const N: usize = 97;
        let (lo, hi) = (20.0f64.ln(), 1000.0f64.ln());
        let mut freqs: Vec<f64> = (0..N)
            .map(|i| (lo + (hi - lo) * i as f64 / (N - 1) as f64).exp())
            .collect();
        if !freqs.iter().any(|&f| (f - resonance_hz).abs() < 1e-9) {
            freqs.push(resonance_hz);
            freqs.sort_by(f64::total_cmp);
        }
        let points = freqs
            .into_iter()
            .map(|f| (f, band_pass_magnitude(f, resonance_hz, q)))
            .collect();
        Self::new(points, max_boost)
    }

    /// Default profile: synthetic LRA resonant at 175 Hz with Q = 8.
    pub fn default_synthetic() -> Self {
        Self::synthetic_lra(175.0, 8.0, DEFAULT_MAX_BOOST).expect("valid constants")
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn max_boost(&self) -> f64 {
        self.max_boost
    }

    pub fn with_max_boost(self, max_boost: f64) -> Result<Self> {
        Self::new(self.points, max_boost)
    }

    /// Gain interpolated linearly in (log frequency, gain); clamps to the
    /// end gains outside the table.
    pub fn interp_gain(&self, freq_hz: f64) -> f64 {
        let pts = &self.points;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if freq_hz <= first.0 {
            return first.1;
        }
        if freq_hz >= last.0 {
            return last.1;
        }
        // first index whose frequency exceeds the query
        let hi = pts.partition_point(|&(f, _)| f <= freq_hz);
        let (f0, g0) = pts[hi - 1];
        let (f1, g1) = pts[hi];
        if freq_hz == f0 {
            return g0;
        }
        let t = (freq_hz.ln() - f0.ln()) / (f1.ln() - f0.ln());
        g0 + t * (g1 - g0)
    }

    /// Drive weight that equalizes output strength: the reciprocal of the
    /// interpolated gain, capped at `max_boost`.
    pub fn weight(&self, freq_hz: f64) -> Result<f64> {
        if !(freq_hz.is_finite() && freq_hz > 0.0) {
            return Err(Error::invalid(format!("weight frequency must be positive, got {freq_hz}")));
        }
        Ok(self.max_boost.min(1.0 / self.interp_gain(freq_hz)))
    }

    /// Read `freq_hz,gain` rows; `#` lines are comments.
    pub fn load(path: impl AsRef<Path>, max_boost: f64) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |m: String| Error::Parse {
                path: path.to_path_buf(),
                message: format!("line {}: {m}", i + 1),
            };
            let (f, g) = line
                .split_once(',')
                .ok_or_else(|| parse_err(format!("expected freq_hz,gain, got {line:?}")))?;
            let f: f64 = f.trim().parse().map_err(|_| parse_err(format!("bad frequency {f:?}")))?;
            let g: f64 = g.trim().parse().map_err(|_| parse_err(format!("bad gain {g:?}")))?;
            points.push((f, g));
        }
        Self::new(points, max_boost)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        out.push_str(PROFILE_HEADER);
        out.push('\n');
        for (f, g) in &self.points {
            out.push_str(&format!("{f},{g}\n"));
        }
        fs::File::create(path)
            .and_then(|mut file| file.write_all(out.as_bytes()))
            .map_err(|e| Error::io(path, e))
    }
}

/// |H(f)| of a second-order band-pass with unit gain at `f0`.
pub fn band_pass_magnitude(f: f64, f0: f64, q: f64) -> f64 {
    let detune = f / f0 - f0 / f;
    1.0 / (1.0 + q * q * detune * detune).sqrt()
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<ActuatorProfile> {
    ActuatorProfile::load(path, DEFAULT_MAX_BOOST)
}
