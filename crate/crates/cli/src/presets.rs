//! Pen presets: a tactile pattern, a loopable friction sound and coupling
//! parameters per pen, stored as `<dir>/<name>/{tactile.wav,audio.wav,coupling.json}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use penfeel_core::audio_loop::{equalize_max_amplitude, find_loop, LoopParams};
use penfeel_core::friction_sim::simulate;
use penfeel_core::session::PenTable;
use penfeel_core::signal::{load_signal, save_signal, WavEncoding};
use penfeel_core::{CouplingParams, PipelineConfig, SignalFormat, SimConfig, TextureComponent};

use crate::commands::{analyze_signal, synth_report};

pub const TACTILE_FILE: &str = "tactile.wav";
pub const AUDIO_FILE: &str = "audio.wav";
pub const COUPLING_FILE: &str = "coupling.json";
pub const PEAKS_FILE: &str = "peaks.json";

/// Recipe for one simulated pen: forcing lines (Hz at the stroke speed) and
/// their modulation depths, plus its coupling.
pub struct PenRecipe {
    pub name: &'static str,
    /// Lines in the tactile range.
    pub tactile: &'static [(f64, f64)],
    /// Extra lines heard but too high to feel.
    pub audible: &'static [(f64, f64)],
    pub coupling: CouplingParams,
}

const STROKE_SPEED: f64 = 0.05;
const AUDIO_FS: f64 = 44100.0;

pub fn recipes() -> [PenRecipe; 3] {
    let base = CouplingParams::default();
    [
        PenRecipe {
            name: "ballpoint",
            tactile: &[(70.0, 0.25), (150.0, 0.15), (260.0, 0.1)],
            audible: &[(1250.0, 0.08), (2300.0, 0.05)],
            coupling: base,
        },
        PenRecipe {
            name: "pencil",
            tactile: &[(95.0, 0.2), (190.0, 0.15), (330.0, 0.12)],
            audible: &[(1800.0, 0.1), (3400.0, 0.08), (5200.0, 0.06)],
            coupling: CouplingParams { c_p: 0.8, ..base },
        },
        PenRecipe {
            name: "marker",
            tactile: &[(120.0, 0.25), (225.0, 0.15), (410.0, 0.08)],
            audible: &[(800.0, 0.06), (1500.0, 0.04)],
            coupling: CouplingParams { c_p: 0.6, c_x: 0.4 / penfeel_core::coupling::REFERENCE_SPEED, ..base },
        },
    ]
}

fn sim_config(lines: &[(f64, f64)], fs_hz: f64, duration_s: f64) -> SimConfig {
    SimConfig {
        pen_speed_m_per_s: STROKE_SPEED,
        texture: lines
            .iter()
            .enumerate()
            .map(|(i, &(f, depth))| TextureComponent {
                spatial_freq_cycles_per_m: f / STROKE_SPEED,
                depth,
                phase_rad: 0.9 * i as f64,
            })
            .collect(),
        fs_hz,
        duration_s,
        ..SimConfig::default()
    }
}

/// Simulate, analyse and render every preset into `dir`.
pub fn make_presets(dir: &Path, cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let recipes = recipes();
    let mut audio = Vec::new();
    let mut written = Vec::new();
    for r in &recipes {
        let pen_dir = dir.join(r.name);
        fs::create_dir_all(&pen_dir).with_context(|| format!("creating {}", pen_dir.display()))?;

        let recording = simulate(&sim_config(r.tactile, cfg.fs, cfg.pattern_ms / 1000.0))?;
        let report = analyze_signal(&recording, cfg)?;
        fs::write(pen_dir.join(PEAKS_FILE), report.to_json()?)?;
        let pattern = synth_report(&report, cfg)?;
        save_signal(&pattern.waveform, pen_dir.join(TACTILE_FILE), SignalFormat::Wav(WavEncoding::Float32))?;

        let lines: Vec<(f64, f64)> = r.tactile.iter().chain(r.audible).copied().collect();
        let sound = simulate(&sim_config(&lines, AUDIO_FS, 1.5))?;
        let seg = find_loop(&sound, &LoopParams::from_config(cfg))?;
        audio.push(seg.extract(&sound));

        fs::write(pen_dir.join(COUPLING_FILE), serde_json::to_string_pretty(&r.coupling)?)?;
        written.push(pen_dir);
    }
    for (pen_dir, loop_audio) in written.iter().zip(equalize_max_amplitude(&audio)?) {
        save_signal(&loop_audio, pen_dir.join(AUDIO_FILE), SignalFormat::Wav(WavEncoding::Pcm16))?;
    }
    Ok(written)
}

#[derive(Debug, Clone, Serialize)]
pub struct PenPreset {
    pub name: String,
    pub coupling: CouplingParams,
    #[serde(skip)]
    pub tactile_wav: Vec<u8>,
    #[serde(skip)]
    pub audio_wav: Vec<u8>,
}

/// Presets loaded into memory for serving.
#[derive(Debug, Clone, Default)]
pub struct PresetStore {
    pub presets: BTreeMap<String, PenPreset>,
}

impl PresetStore {
    /// Every subdirectory of `dir` holding the three preset files. Each
    /// asset must decode.
    pub fn load(dir: &Path) -> Result<Self> {
        let entries = fs::read_dir(dir).map_err(|e| penfeel_core::Error::Io { path: dir.into(), source: e })?;
        let mut presets = BTreeMap::new();
        for entry in entries {
            let path = entry?.path();
            if !path.is_dir() {
                continue;
            }
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
            let preset = load_preset(&path, name.clone()).with_context(|| format!("preset {name}"))?;
            presets.insert(name, preset);
        }
        if presets.is_empty() {
            bail!(crate::commands::UsageError(format!("no presets under {}", dir.display())));
        }
        Ok(Self { presets })
    }

    pub fn pen_table(&self) -> PenTable {
        self.presets.iter().map(|(n, p)| (n.clone(), p.coupling)).collect()
    }
}

fn load_preset(dir: &Path, name: String) -> Result<PenPreset> {
    let wav = SignalFormat::Wav(WavEncoding::default());
    let mut bytes = Vec::new();
    for file in [TACTILE_FILE, AUDIO_FILE] {
        let path = dir.join(file);
        load_signal(&path, wav)?;
        bytes.push(fs::read(&path)?);
    }
    let coupling = CouplingParams::load(dir.join(COUPLING_FILE))?;
    let audio_wav = bytes.pop().unwrap_or_default();
    let tactile_wav = bytes.pop().unwrap_or_default();
    Ok(PenPreset { name, coupling, tactile_wav, audio_wav })
}
