//! Analysis and rendering toolkit for digital-pen auditory/tactile feedback.
//!
//! The pipeline mirrors how the feedback assets are produced:
//!
//! 1. [`spectral`]: high-pass the friction oscillation recording, cut it into
//!    fixed-length units and pick each unit's principal frequencies.
//! 2. [`actuator`]: derive an equalizing weight from an actuator response.
//! 3. [`synth`]: superpose weighted sinusoids per unit into a loopable
//!    vibrotactile drive pattern.
//! 4. [`audio_loop`]: find a seamlessly loopable window of friction sound.
//! 5. [`coupling`]: modulate playback gain from live pressure and speed.
//!
//! [`friction_sim`] produces synthetic recordings with known spectra and
//! [`session`] implements the per-connection message handling used by the
//! streaming service.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actuator;
pub mod audio_loop;
pub mod config;
pub mod coupling;
mod error;
pub mod friction_sim;
pub mod session;
pub mod signal;
pub mod spectral;
pub mod synth;

pub use actuator::ActuatorProfile;
pub use audio_loop::LoopSegment;
pub use config::PipelineConfig;
pub use coupling::{CouplingParams, CouplingState, PenTrace, TracePoint};
pub use error::{Error, Result};
pub use friction_sim::{SimConfig, TextureComponent};
pub use signal::{SampledSignal, SignalFormat};
pub use spectral::{Peak, PeakSet, UnitSpectrum};
pub use synth::{SubPattern, TactilePattern};
