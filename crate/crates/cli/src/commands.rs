use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

use penfeel_core::audio_loop::{find_loop, LoopParams};
use penfeel_core::friction_sim::simulate;
use penfeel_core::signal::{load_signal, save_signal, WavEncoding};
use penfeel_core::spectral::{analyze, PeakReport};
use penfeel_core::synth::{synthesize, AmplitudeMapping};
use penfeel_core::{ActuatorProfile, LoopSegment, PipelineConfig, SampledSignal, SignalFormat, SimConfig, TactilePattern};

/// A bad argument combination detected by the command layer (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Read a WAV, or a CSV at the configured rate.
pub fn read_signal(path: &Path, cfg: &PipelineConfig) -> Result<SampledSignal> {
    let format = SignalFormat::from_path(path, Some(cfg.fs))?;
    Ok(load_signal(path, format)?)
}

/// Write by extension: CSV as text, anything else as 32-bit float WAV.
pub fn write_signal(signal: &SampledSignal, path: &Path) -> Result<()> {
    let format = match SignalFormat::from_path(path, Some(signal.sample_rate_hz)) {
        Ok(f @ SignalFormat::Csv { .. }) => f,
        _ => SignalFormat::Wav(WavEncoding::Float32),
    };
    save_signal(signal, path, format).with_context(|| format!("writing {}", path.display()))
}

fn emit(text: &str, dest: Option<&Path>) -> Result<()> {
    match dest {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

pub fn profile_for(cfg: &PipelineConfig) -> Result<ActuatorProfile> {
    Ok(match &cfg.profile {
        Some(path) => ActuatorProfile::load(path, cfg.max_boost)?,
        None => ActuatorProfile::default_synthetic().with_max_boost(cfg.max_boost)?,
    })
}

pub fn analyze_signal(signal: &SampledSignal, cfg: &PipelineConfig) -> Result<PeakReport> {
    Ok(PeakReport { units: analyze(signal, cfg)? })
}

pub fn cmd_analyze(input: &Path, output: Option<&Path>, cfg: &PipelineConfig) -> Result<()> {
    let signal = read_signal(input, cfg)?;
    let report = analyze_signal(&signal, cfg)?;
    emit(&report.to_json()?, output)
}

pub fn synth_report(report: &PeakReport, cfg: &PipelineConfig) -> Result<TactilePattern> {
    if report.units.is_empty() {
        return Err(UsageError("peaks file lists no units".into()).into());
    }
    Ok(synthesize(&report.units, &profile_for(cfg)?, cfg.fs, cfg)?)
}

pub fn cmd_synth(
    peaks: &Path,
    output: &Path,
    describe: Option<&Path>,
    mapping: Option<AmplitudeMapping>,
    cfg: &PipelineConfig,
) -> Result<()> {
    let text = fs::read_to_string(peaks).map_err(|e| penfeel_core::Error::Io { path: peaks.into(), source: e })?;
    let report = PeakReport::from_json(&text)?;
    let mut cfg = cfg.clone();
    if let Some(m) = mapping {
        cfg.amplitude_mapping = m;
    }
    let pattern = synth_report(&report, &cfg)?;
    write_signal(&pattern.waveform, output)?;
    emit(&serde_json::to_string_pretty(&pattern.description())?, describe)
}

pub fn cmd_loopfind(
    input: &Path,
    output: &Path,
    segment: Option<&Path>,
    window_ms: Option<f64>,
    cfg: &PipelineConfig,
) -> Result<()> {
    let audio = read_signal(input, cfg)?;
    let mut params = LoopParams::from_config(cfg);
    if let Some(w) = window_ms {
        params.window_ms = w;
    }
    let seg = find_loop(&audio, &params)?;
    write_signal(&seg.extract(&audio), output)?;
    emit(&segment_json(&seg)?, segment)
}

fn segment_json(seg: &LoopSegment) -> Result<String> {
    Ok(serde_json::to_string_pretty(seg)?)
}

pub fn load_sim_config(path: Option<&Path>) -> Result<SimConfig> {
    let Some(path) = path else {
        return Ok(SimConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| penfeel_core::Error::Io { path: path.into(), source: e })?;
    let cfg: SimConfig = serde_json::from_str(&text).map_err(|e| penfeel_core::Error::Parse {
        path: path.into(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_simulate(sim: Option<&Path>, output: &Path) -> Result<()> {
    let cfg = load_sim_config(sim)?;
    write_signal(&simulate(&cfg)?, output)
}
