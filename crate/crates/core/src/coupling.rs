//! Live playback gain from writing pressure and speed.
//!
//! `gain = clamp(c_p * (pressure - c_op) + c_x * (speed - c_ov), lo, hi)`

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pointer speed (screen units per second) treated as a brisk stroke when
/// picking the default speed coefficient.
pub const REFERENCE_SPEED: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingParams {
    /// Gain per unit of normalized pressure.
    pub c_p: f64,
    /// Pressure offset.
    pub c_op: f64,
    /// Gain per unit of speed.
    pub c_x: f64,
    /// Speed offset.
    pub c_ov: f64,
    /// Speed smoothing factor in (0, 1].
    pub ema_alpha: f64,
    pub clamp: (f64, f64),
}

impl Default for CouplingParams {
    /// Synthetic defaults: a mid-pressure, mid-speed stroke lands near 0.5.
    fn default() -> Self {
        Self {
            c_p: 0.7,
            c_op: 0.05,
            c_x: 0.3 / REFERENCE_SPEED,
            c_ov: 0.0,
            ema_alpha: 0.3,
            clamp: (0.0, 1.0),
        }
    }
}

impl CouplingParams {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.c_p, self.c_op, self.c_x, self.c_ov, self.clamp.0, self.clamp.1]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::invalid("coupling parameters must be finite"));
        }
        if self.c_p < 0.0 || self.c_x < 0.0 {
            return Err(Error::invalid("c_p and c_x must be non-negative"));
        }
        if !(self.clamp.1 > self.clamp.0) {
            return Err(Error::invalid("clamp upper bound must exceed lower bound"));
        }
        if !(self.ema_alpha > 0.0 && self.ema_alpha <= 1.0) {
            return Err(Error::invalid("ema_alpha must be in (0, 1]"));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let params: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        params.validate()?;
        Ok(params)
    }

    /// Unclamped linear combination.
    pub fn raw_amplitude(&self, pressure: f64, speed: f64) -> f64 {
        self.c_p * (pressure - self.c_op) + self.c_x * (speed - self.c_ov)
    }
}

pub fn coupled_amplitude(params: &CouplingParams, pressure: f64, speed: f64) -> Result<f64> {
    if !(pressure.is_finite() && speed.is_finite()) {
        return Err(Error::invalid("pressure and speed must be finite"));
    }
    let (lo, hi) = params.clamp;
    Ok(params.raw_amplitude(pressure, speed).clamp(lo, hi))
}

/// One pointer sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Seconds.
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Normalized to [0, 1].
    pub pressure: f64,
}

/// Timestamped pointer stream of one stroke or session.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PenTrace {
    pub points: Vec<TracePoint>,
}

impl PenTrace {
    pub fn new(points: Vec<TracePoint>) -> Result<Self> {
        for p in &points {
            if !(0.0..=1.0).contains(&p.pressure) {
                return Err(Error::invalid(format!("pressure {} outside [0, 1]", p.pressure)));
            }
        }
        if points.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::invalid("trace timestamps must be strictly increasing"));
        }
        Ok(Self { points })
    }

    /// Gain after each point, starting from a fresh state.
    pub fn gains(&self, params: &CouplingParams) -> Result<Vec<f64>> {
        let mut state = CouplingState::new(params.ema_alpha)?;
        self.points
            .iter()
            .map(|p| {
                let speed = state.update(p)?;
                coupled_amplitude(params, p.pressure, speed)
            })
            .collect()
    }
}

/// Speed estimator state for one writing session.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingState {
    pub smoothed_speed: f64,
    pub last_point: Option<TracePoint>,
    pub ema_alpha: f64,
}

impl CouplingState {
    pub fn new(ema_alpha: f64) -> Result<Self> {
        if !(ema_alpha > 0.0 && ema_alpha <= 1.0) {
            return Err(Error::invalid(format!("ema_alpha must be in (0, 1], got {ema_alpha}")));
        }
        Ok(Self {
            smoothed_speed: 0.0,
            last_point: None,
            ema_alpha,
        })
    }

    /// Fold in a new point and return the smoothed speed. The first point
    /// yields 0.
    pub fn update(&mut self, point: &TracePoint) -> Result<f64> {
        if !(point.t.is_finite() && point.x.is_finite() && point.y.is_finite()) {
            return Err(Error::invalid("trace point must be finite"));
        }
        if let Some(last) = self.last_point {
            let dt = point.t - last.t;
            if !(dt > 0.0) {
                return Err(Error::invalid(format!(
                    "non-increasing timestamp: {} after {}",
                    point.t, last.t
                )));
            }
            let instantaneous = (point.x - last.x).hypot(point.y - last.y) / dt;
            self.smoothed_speed =
                self.ema_alpha * instantaneous + (1.0 - self.ema_alpha) * self.smoothed_speed;
        }
        self.last_point = Some(*point);
        Ok(self.smoothed_speed)
    }
}

/// Functional form of [`CouplingState::update`].
pub fn update_speed(state: &CouplingState, point: &TracePoint) -> Result<(CouplingState, f64)> {
    let mut next = state.clone();
    let speed = next.update(point)?;
    Ok((next, speed))
}
