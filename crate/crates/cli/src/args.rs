use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use penfeel_core::config::parse_band;
use penfeel_core::synth::AmplitudeMapping;
use penfeel_core::PipelineConfig;

#[derive(Debug, Parser)]
#[command(name = "penfeel", version, about = "Friction feedback asset pipeline and live coupling service")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

/// Pipeline settings. Flags override the config file, which overrides the
/// built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    /// JSON pipeline config (same keys as the flags below).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Sample rate in Hz (tactile rendering rate; rate of CSV inputs).
    #[arg(long, global = true)]
    pub fs: Option<f64>,
    /// Principal frequencies per unit.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long = "unit-ms", global = true)]
    pub unit_ms: Option<f64>,
    /// Analysis band as lo:hi in Hz.
    #[arg(long, global = true, value_name = "LO:HI")]
    pub band: Option<String>,
    /// Actuator response table (frequency,gain lines).
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    #[arg(long, global = true)]
    pub port: Option<u16>,
}

impl GlobalOpts {
    pub fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(fs) = self.fs {
            cfg.fs = fs;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(unit_ms) = self.unit_ms {
            // keep the number of pattern slots; the pattern length follows
            let slots = cfg.pattern_units();
            cfg.unit_ms = unit_ms;
            cfg.pattern_ms = slots as f64 * unit_ms;
        }
        if let Some(band) = &self.band {
            cfg.band = parse_band(band).context("--band")?;
        }
        if let Some(profile) = &self.profile {
            cfg.profile = Some(profile.clone());
        }
        if let Some(port) = self.port {
            cfg.port = port;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract per-unit principal frequencies from a recording.
    Analyze {
        /// WAV or CSV (CSV takes its rate from --fs).
        input: PathBuf,
        /// Peaks JSON destination; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a tactile pattern from a peaks JSON file.
    Synth {
        peaks: PathBuf,
        /// Pattern WAV.
        #[arg(short, long)]
        output: PathBuf,
        /// Pattern description JSON; stdout when omitted.
        #[arg(long)]
        describe: Option<PathBuf>,
        #[arg(long, value_enum)]
        mapping: Option<Mapping>,
    },
    /// Find a seamlessly loopable window in a sound recording.
    Loopfind {
        input: PathBuf,
        /// Loop WAV.
        #[arg(short, long)]
        output: PathBuf,
        /// Segment JSON; stdout when omitted.
        #[arg(long)]
        segment: Option<PathBuf>,
        #[arg(long = "window-ms")]
        window_ms: Option<f64>,
    },
    /// Run the pen friction simulator.
    Simulate {
        /// Simulator settings JSON; defaults when omitted.
        #[arg(long = "sim")]
        sim: Option<PathBuf>,
        /// WAV or CSV output.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate the bundled pen presets from simulated recordings.
    MakePresets {
        /// Destination directory (one subdirectory per pen).
        dir: PathBuf,
    },
    /// Serve presets over HTTP and live gain over a message channel.
    Serve {
        /// Presets directory.
        #[arg(long, default_value = "presets")]
        presets: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mapping {
    Linear,
    Sqrt,
}

impl From<Mapping> for AmplitudeMapping {
    fn from(m: Mapping) -> Self {
        match m {
            Mapping::Linear => AmplitudeMapping::Linear,
            Mapping::Sqrt => AmplitudeMapping::Sqrt,
        }
    }
}
