//! Single-degree-of-freedom pen-tip model sliding over a textured surface.
//!
//! The tip (mass `m`) hangs from the hand by a spring `k` and damper `c`;
//! the hand traverses the surface at constant speed `V`. With `y` the tip
//! deflection relative to the hand,
//!
//! ```text
//! m·ÿ + c·ẏ + k·y = −sgn(V + ẏ)·μ·F_n(t)
//! F_n(t) = F_n·(1 + Σ depth_j·sin(2π·sf_j·V·t + φ_j))
//! ```
//!
//! so each texture component forces the tip at `V·sf_j` Hz. The returned
//! trace is the tip acceleration, as an accelerometer on the pen would
//! record it.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextureComponent {
    pub spatial_freq_cycles_per_m: f64,
    /// Fractional normal-force modulation.
    pub depth: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub mass_kg: f64,
    pub stiffness_n_per_m: f64,
    pub damping_ns_per_m: f64,
    /// Dynamic friction coefficient.
    pub mu_s: f64,
    pub normal_force_n: f64,
    pub pen_speed_m_per_s: f64,
    pub texture: Vec<TextureComponent>,
    pub fs_hz: f64,
    pub duration_s: f64,
    /// Starting deflection; the static sliding equilibrium when unset.
    pub initial_displacement_m: Option<f64>,
    pub initial_velocity_m_per_s: f64,
}

impl Default for SimConfig {
    /// Placeholder hand-pen constants (not measured values): 31.8 Hz
    /// natural frequency, damping ratio 0.05.
    fn default() -> Self {
        Self {
            mass_kg: 0.01,
            stiffness_n_per_m: 400.0,
            damping_ns_per_m: 0.2,
            mu_s: 0.3,
            normal_force_n: 1.0,
            pen_speed_m_per_s: 0.05,
            texture: Vec::new(),
            fs_hz: 1344.0,
            duration_s: 1.5,
            initial_displacement_m: None,
            initial_velocity_m_per_s: 0.0,
        }
    }
}

/// sgn with sgn(0) = 0.
fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        let finite = [
            self.mass_kg,
            self.stiffness_n_per_m,
            self.damping_ns_per_m,
            self.mu_s,
            self.normal_force_n,
            self.pen_speed_m_per_s,
            self.fs_hz,
            self.duration_s,
            self.initial_velocity_m_per_s,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return bad("simulation parameters must be finite".into());
        }
        if !(self.mass_kg > 0.0 && self.stiffness_n_per_m > 0.0) {
            return bad("mass and stiffness must be positive".into());
        }
        if self.damping_ns_per_m < 0.0 || self.mu_s < 0.0 || self.normal_force_n < 0.0 {
            return bad("damping, friction coefficient and normal force must be non-negative".into());
        }
        if !(self.fs_hz > 0.0 && self.duration_s > 0.0) {
            return bad("fs_hz and duration_s must be positive".into());
        }
        let mut depth_sum = 0.0;
        for c in &self.texture {
            if !(c.depth >= 0.0 && c.depth < 1.0) {
                return bad(format!("texture depth {} outside [0, 1)", c.depth));
            }
            if !(c.spatial_freq_cycles_per_m.is_finite() && c.spatial_freq_cycles_per_m >= 0.0) {
                return bad("texture spatial frequency must be non-negative".into());
            }
            depth_sum += c.depth;
        }
        if depth_sum >= 1.0 {
            return bad(format!("texture depths sum to {depth_sum}; must stay below 1"));
        }
        Ok(())
    }

    /// Normal force at time `t`.
    pub fn normal_force(&self, t: f64) -> f64 {
        let v = self.pen_speed_m_per_s;
        let modulation: f64 = self
            .texture
            .iter()
            .map(|c| c.depth * (TAU * c.spatial_freq_cycles_per_m * v * t + c.phase_rad).sin())
            .sum();
        self.normal_force_n * (1.0 + modulation)
    }

    /// Temporal frequency each texture component excites.
    pub fn forcing_frequencies(&self) -> Vec<f64> {
        self.texture
            .iter()
            .map(|c| c.spatial_freq_cycles_per_m * self.pen_speed_m_per_s)
            .collect()
    }

    /// Deflection at which the mean friction force is balanced by the spring.
    pub fn equilibrium_displacement(&self) -> f64 {
        -sgn(self.pen_speed_m_per_s) * self.mu_s * self.normal_force_n / self.stiffness_n_per_m
    }

    fn acceleration(&self, t: f64, y: f64, v: f64) -> f64 {
        let friction = -sgn(self.pen_speed_m_per_s + v) * self.mu_s * self.normal_force(t);
        (friction - self.damping_ns_per_m * v - self.stiffness_n_per_m * y) / self.mass_kg
    }

    pub fn sample_count(&self) -> usize {
        (self.duration_s * self.fs_hz).round() as usize
    }
}

/// Raw (unnormalized) state history at the output rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub displacement: Vec<f64>,
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
    pub fs_hz: f64,
}

impl SimTrace {
    /// Mechanical energy of the relative motion at each sample.
    pub fn energy(&self, cfg: &SimConfig) -> Vec<f64> {
        self.displacement
            .iter()
            .zip(&self.velocity)
            .map(|(y, v)| 0.5 * cfg.mass_kg * v * v + 0.5 * cfg.stiffness_n_per_m * y * y)
            .collect()
    }
}

/// Fixed-step classical Runge-Kutta integration at `dt = 1 / fs`.
pub fn simulate_raw(cfg: &SimConfig) -> Result<SimTrace> {
    cfg.validate()?;
    let n = cfg.sample_count();
    if n == 0 {
        return Err(Error::invalid("simulation shorter than one sample"));
    }
    let dt = 1.0 / cfg.fs_hz;
    let mut y = cfg
        .initial_displacement_m
        .unwrap_or_else(|| cfg.equilibrium_displacement());
    let mut v = cfg.initial_velocity_m_per_s;
    let mut trace = SimTrace {
        displacement: Vec::with_capacity(n),
        velocity: Vec::with_capacity(n),
        acceleration: Vec::with_capacity(n),
        fs_hz: cfg.fs_hz,
    };
    for i in 0..n {
        let t = i as f64 * dt;
        let a = cfg.acceleration(t, y, v);
        trace.displacement.push(y);
        trace.velocity.push(v);
        trace.acceleration.push(a);

        let (k1y, k1v) = (v, a);
        let (k2y, k2v) = (
            v + 0.5 * dt * k1v,
            cfg.acceleration(t + 0.5 * dt, y + 0.5 * dt * k1y, v + 0.5 * dt * k1v),
        );
        let (k3y, k3v) = (
            v + 0.5 * dt * k2v,
            cfg.acceleration(t + 0.5 * dt, y + 0.5 * dt * k2y, v + 0.5 * dt * k2v),
        );
        let (k4y, k4v) = (
            v + dt * k3v,
            cfg.acceleration(t + dt, y + dt * k3y, v + dt * k3v),
        );
        y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    Ok(trace)
}

/// Tip acceleration normalized to peak 1.0 (left at zero if the tip never
/// accelerates).
pub fn simulate(cfg: &SimConfig) -> Result<SampledSignal> {
    let trace = simulate_raw(cfg)?;
    Ok(SampledSignal::new(trace.acceleration, cfg.fs_hz)?.normalized())
}

/// Natural frequency in Hz: undamped `sqrt(k/m)/2π`, or damped
/// `sqrt(k/m - (c/2m)^2)/2π`, which requires an underdamped system.
pub fn natural_frequency(cfg: &SimConfig, damped: bool) -> Result<f64> {
    let (m, k, c) = (cfg.mass_kg, cfg.stiffness_n_per_m, cfg.damping_ns_per_m);
    if !(m > 0.0 && k > 0.0) {
        return Err(Error::invalid("mass and stiffness must be positive"));
    }
    let w0_sq = k / m;
    if !damped {
        return Ok(w0_sq.sqrt() / TAU);
    }
    if c * c >= 4.0 * k * m {
        return Err(Error::invalid(format!(
            "system is not underdamped (c² = {} ≥ 4km = {})",
            c * c,
            4.0 * k * m
        )));
    }
    let decay = c / (2.0 * m);
    Ok((w0_sq - decay * decay).sqrt() / TAU)
}
