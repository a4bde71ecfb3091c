//! Sampled signals and their WAV / CSV storage.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Full-scale divisor for 16-bit PCM.
const I16_SCALE: f64 = 32768.0;

/// Uniformly sampled real-valued time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSignal {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::invalid(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    /// Signal whose samples are `f(t)` for `t = i / fs`.
    pub fn from_fn(len: usize, sample_rate_hz: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..len).map(|i| f(i as f64 / sample_rate_hz)).collect();
        Self::new(samples, sample_rate_hz)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    pub fn peak(&self) -> f64 {
        peak_abs(&self.samples)
    }

    pub fn rms(&self) -> f64 {
        rms(&self.samples)
    }

    /// Scale so the largest magnitude is exactly 1.0. Silent signals are
    /// returned unchanged.
    pub fn normalized(&self) -> Self {
        let peak = self.peak();
        if peak == 0.0 || peak == 1.0 {
            return self.clone();
        }
        Self {
            samples: self.samples.iter().map(|s| s / peak).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    pub fn slice(&self, start: usize, len: usize) -> Self {
        Self {
            samples: self.samples[start..start + len].to_vec(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    pub(crate) fn require_non_empty(&self) -> Result<()> {
        if self.samples.is_empty() {
            Err(Error::EmptySignal)
        } else {
            Ok(())
        }
    }
}

pub fn peak_abs(samples: &[f64]) -> f64 {
    samples.iter().fold(0.0f64, |m, s| m.max(s.abs()))
}

pub fn rms(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    (samples.iter().map(|s| s * s).sum::<f64>() / samples.len() as f64).sqrt()
}

/// Number of whole samples spanning `ms` milliseconds at `fs`.
pub fn ms_to_samples(ms: f64, fs: f64) -> usize {
    // the epsilon keeps exact products such as 300 ms * 44.1 kHz from
    // rounding down a sample
    (ms * fs / 1000.0 + 1e-9).floor() as usize
}

/// On-disk representation of a signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalFormat {
    /// RIFF WAV. Reading accepts 16-bit PCM and 32-bit float; writing uses
    /// the given encoding.
    Wav(WavEncoding),
    /// One amplitude per line. CSV carries no rate, so it is supplied here.
    Csv { sample_rate_hz: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavEncoding {
    #[default]
    Pcm16,
    Float32,
}

impl SignalFormat {
    /// Guess from the extension. CSV needs a rate, so `csv_rate` must be set
    /// for `.csv` / `.txt` paths.
    pub fn from_path(path: &Path, csv_rate: Option<f64>) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        match ext.as_deref() {
            Some("wav") => Ok(SignalFormat::Wav(WavEncoding::Pcm16)),
            Some("csv") | Some("txt") => match csv_rate {
                Some(sample_rate_hz) => Ok(SignalFormat::Csv { sample_rate_hz }),
                None => Err(Error::invalid("CSV input requires a sample rate (--fs)")),
            },
            _ => Err(Error::UnsupportedEncoding(format!(
                "cannot infer format of {}",
                path.display()
            ))),
        }
    }
}

pub fn load_signal(path: impl AsRef<Path>, format: SignalFormat) -> Result<SampledSignal> {
    let path = path.as_ref();
    let signal = match format {
        SignalFormat::Wav(_) => load_wav(path)?,
        SignalFormat::Csv { sample_rate_hz } => load_csv(path, sample_rate_hz)?,
    };
    signal.require_non_empty()?;
    Ok(signal)
}

pub fn save_signal(signal: &SampledSignal, path: impl AsRef<Path>, format: SignalFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        SignalFormat::Wav(enc) => save_wav(signal, path, enc),
        SignalFormat::Csv { .. } => save_csv(signal, path),
    }
}

fn load_wav(path: &Path) -> Result<SampledSignal> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.len() == 0 {
        return Err(Error::EmptySignal);
    }
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    let channels = spec.channels.max(1) as usize;
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / I16_SCALE))
            .collect::<std::result::Result<_, _>>()?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()?,
        (fmt, bits) => {
            return Err(Error::UnsupportedEncoding(format!(
                "{bits}-bit {fmt:?} WAV (only 16-bit PCM and 32-bit float)"
            )))
        }
    };
    let samples = interleaved.into_iter().step_by(channels).collect();
    SampledSignal::new(samples, spec.sample_rate as f64)
}

fn save_wav(signal: &SampledSignal, path: &Path, encoding: WavEncoding) -> Result<()> {
    let rate = signal.sample_rate_hz.round();
    if rate < 1.0 || rate > u32::MAX as f64 {
        return Err(Error::invalid(format!(
            "sample rate {} not representable in WAV",
            signal.sample_rate_hz
        )));
    }
    let (bits, sample_format) = match encoding {
        WavEncoding::Pcm16 => (16, hound::SampleFormat::Int),
        WavEncoding::Float32 => (32, hound::SampleFormat::Float),
    };
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: rate as u32,
        bits_per_sample: bits,
        sample_format,
    };
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = hound::WavWriter::new(BufWriter::new(file), spec)?;
    for &s in &signal.samples {
        match encoding {
            WavEncoding::Pcm16 => {
                let q = (s * I16_SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64);
                writer.write_sample(q as i16)?;
            }
            WavEncoding::Float32 => writer.write_sample(s as f32)?,
        }
    }
    writer.finalize()?;
    Ok(())
}

fn load_csv(path: &Path, sample_rate_hz: f64) -> Result<SampledSignal> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            message: format!("line {}: not a number: {line:?}", lineno + 1),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                message: format!("line {}: non-finite sample", lineno + 1),
            });
        }
        samples.push(v);
    }
    if samples.is_empty() {
        return Err(Error::EmptySignal);
    }
    SampledSignal::new(samples, sample_rate_hz)
}

fn save_csv(signal: &SampledSignal, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    // `{}` on f64 prints the shortest representation that parses back to
    // the same bits.
    for s in &signal.samples {
        writeln!(w, "{s}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const WAV16: SignalFormat = SignalFormat::Wav(WavEncoding::Pcm16);

    #[test]
    fn silent_wav_loads_as_zeros() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("silence.wav");
        let sig = SampledSignal::new(vec![0.0; 44100], 44100.0).unwrap();
        save_signal(&sig, &p, WAV16).unwrap();
        let back = load_signal(&p, WAV16).unwrap();
        assert_eq!(back.len(), 44100);
        assert_eq!(back.sample_rate_hz, 44100.0);
        assert!(back.samples.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn csv_direct_parse() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        fs::write(&p, "0.5\n-0.5").unwrap();
        let sig = load_signal(&p, SignalFormat::Csv { sample_rate_hz: 1344.0 }).unwrap();
        assert_eq!(sig, SampledSignal::new(vec![0.5, -0.5], 1344.0).unwrap());
    }

    #[test]
    fn zero_length_files_are_empty_signals() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.csv");
        fs::write(&p, "").unwrap();
        let err = load_signal(&p, SignalFormat::Csv { sample_rate_hz: 1000.0 }).unwrap_err();
        assert_eq!(err.to_string(), "empty signal");

        let p = dir.path().join("empty.wav");
        fs::write(&p, "").unwrap();
        assert!(matches!(load_signal(&p, WAV16), Err(Error::EmptySignal)));

        // header-only WAV
        let p = dir.path().join("hdr.wav");
        save_signal(&SampledSignal::new(vec![], 8000.0).unwrap(), &p, WAV16).unwrap();
        assert!(matches!(load_signal(&p, WAV16), Err(Error::EmptySignal)));
    }

    #[test]
    fn csv_roundtrip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tone.csv");
        let sig = SampledSignal::from_fn(1344, 1344.0, |t| (2.0 * PI * 100.0 * t).sin()).unwrap();
        let fmt = SignalFormat::Csv { sample_rate_hz: 1344.0 };
        save_signal(&sig, &p, fmt).unwrap();
        let back = load_signal(&p, fmt).unwrap();
        assert_eq!(back.samples.len(), sig.samples.len());
        for (a, b) in back.samples.iter().zip(&sig.samples) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn wav16_roundtrip_within_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tone.wav");
        let sig = SampledSignal::from_fn(4410, 44100.0, |t| (2.0 * PI * 100.0 * t).sin()).unwrap();
        save_signal(&sig, &p, WAV16).unwrap();
        let back = load_signal(&p, WAV16).unwrap();
        let err = back
            .samples
            .iter()
            .zip(&sig.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 2f64.powi(-15), "max err {err}");
    }

    #[test]
    fn float_wav_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.wav");
        let sig = SampledSignal::new(vec![0.25, -0.75, 1.0, 0.0], 1344.0).unwrap();
        save_signal(&sig, &p, SignalFormat::Wav(WavEncoding::Float32)).unwrap();
        let back = load_signal(&p, WAV16).unwrap();
        assert_eq!(back, sig);
    }

    #[test]
    fn stereo_wav_takes_first_channel() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("st.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&p, spec).unwrap();
        for (l, r) in [(16384i16, -1i16), (-8192, 5)] {
            w.write_sample(l).unwrap();
            w.write_sample(r).unwrap();
        }
        w.finalize().unwrap();
        let sig = load_signal(&p, WAV16).unwrap();
        assert_eq!(sig.samples, vec![0.5, -0.25]);
    }

    #[test]
    fn rejects_24_bit_wav() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("24.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 24,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&p, spec).unwrap();
        w.write_sample(1i32).unwrap();
        w.finalize().unwrap();
        assert!(matches!(load_signal(&p, WAV16), Err(Error::UnsupportedEncoding(_))));
    }

    #[test]
    fn unwritable_path_errors() {
        let sig = SampledSignal::new(vec![0.1], 1000.0).unwrap();
        let p = Path::new("/nonexistent-dir/definitely/not/here.csv");
        assert!(save_signal(&sig, p, SignalFormat::Csv { sample_rate_hz: 1000.0 }).is_err());
        assert!(save_signal(&sig, p.with_extension("wav"), WAV16).is_err());
    }

    #[test]
    fn csv_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        fs::write(&p, "0.1\nabc\n").unwrap();
        assert!(matches!(
            load_signal(&p, SignalFormat::Csv { sample_rate_hz: 1.0 }),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn normalization_is_idempotent() {
        let sig = SampledSignal::new(vec![0.2, -0.4, 0.1], 100.0).unwrap();
        let once = sig.normalized();
        assert_eq!(once.peak(), 1.0);
        assert_eq!(once.normalized(), once);
        assert_eq!(once.samples, vec![0.5, -1.0, 0.25]);
    }

    #[test]
    fn rejects_bad_rate() {
        assert!(SampledSignal::new(vec![0.0], 0.0).is_err());
        assert!(SampledSignal::new(vec![0.0], f64::NAN).is_err());
    }

    #[test]
    fn ms_conversion_floors() {
        assert_eq!(ms_to_samples(100.0, 1344.0), 134);
        assert_eq!(ms_to_samples(300.0, 44100.0), 13230);
        assert_eq!(ms_to_samples(100.0, 1000.0), 100);
    }
}
