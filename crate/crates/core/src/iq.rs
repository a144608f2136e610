//! IQ recording ingestion and fixed-cadence segmentation.
//!
//! Two on-disk layouts are supported:
//!
//! * `.wav` — RIFF/WAVE, PCM, exactly two channels (channel 0 = I,
//!   channel 1 = Q), 16-bit signed little-endian samples. Integer samples
//!   are scaled by `1/32768`, so the decoded range is `[-1, 1)`.
//! * `.cf32` — headerless little-endian `f32` pairs `I, Q, I, Q, ...`.
//!   The sample rate is not stored and must be supplied by the caller.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use thiserror::Error;

/// Divisor mapping 16-bit PCM to `[-1, 1)`.
pub const PCM16_SCALE: f64 = 32768.0;

#[derive(Debug, Error)]
pub enum IqError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed WAV: {chunk} chunk: {detail}")]
    Format { chunk: &'static str, detail: String },
    #[error("unsupported WAV layout: {0}")]
    UnsupportedLayout(String),
    #[error("truncated data at byte offset {offset}: {detail}")]
    Truncated { offset: u64, detail: String },
    #[error("non-finite value at sample index {index}")]
    Decode { index: usize },
    #[error("invalid sample rate {0} Hz")]
    SampleRate(f64),
    #[error("invalid cadence: window {window_s} s exceeds interval {interval_s} s")]
    InvalidCadence { interval_s: f64, window_s: f64 },
    #[error("unrecognised IQ file extension for {0} (expected .wav or .cf32)")]
    Extension(PathBuf),
}

/// Where a recording came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    File(PathBuf),
    Simulated { seed: u64 },
    Derived(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File(p) => write!(f, "file:{}", p.display()),
            Origin::Simulated { seed } => write!(f, "simulated:seed={seed}"),
            Origin::Derived(s) => write!(f, "derived:{s}"),
        }
    }
}

/// Complex baseband samples with their sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct IqRecording {
    samples: Vec<Complex64>,
    sample_rate_hz: f64,
    origin: Origin,
}

impl IqRecording {
    /// Builds a recording, rejecting a non-positive rate or non-finite samples.
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64, origin: Origin) -> Result<Self, IqError> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(IqError::SampleRate(sample_rate_hz));
        }
        if let Some(index) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(IqError::Decode { index });
        }
        Ok(IqRecording {
            samples,
            sample_rate_hz,
            origin,
        })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
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

    /// Replaces the sample buffer, keeping rate and origin. Used by stages
    /// that are length-preserving and cannot introduce non-finite values.
    pub(crate) fn with_samples(&self, samples: Vec<Complex64>, origin: Origin) -> IqRecording {
        IqRecording {
            samples,
            sample_rate_hz: self.sample_rate_hz,
            origin,
        }
    }
}

/// A fixed-length window cut from a longer recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub samples: Vec<Complex64>,
    pub start_s: f64,
    pub label: Option<String>,
}

fn read_file(path: &Path) -> Result<Vec<u8>, IqError> {
    fs::read(path).map_err(|source| IqError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Decodes a two-channel 16-bit PCM WAV image already in memory.
pub fn decode_wav_iq(bytes: &[u8], origin: Origin) -> Result<IqRecording, IqError> {
    if bytes.len() < 12 {
        return Err(IqError::Format {
            chunk: "RIFF",
            detail: format!("file is {} bytes, shorter than the 12-byte RIFF header", bytes.len()),
        });
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(IqError::Format {
            chunk: "RIFF",
            detail: "missing RIFF magic".into(),
        });
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(IqError::Format {
            chunk: "RIFF",
            detail: "form type is not WAVE".into(),
        });
    }

    let mut pos = 12usize;
    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        if id == b"fmt " {
            if size < 16 || body + 16 > bytes.len() {
                return Err(IqError::Format {
                    chunk: "fmt",
                    detail: format!("chunk size {size} too small or past end of file"),
                });
            }
            let format_tag = u16_at(bytes, body);
            let channels = u16_at(bytes, body + 2);
            let rate = u32_at(bytes, body + 4);
            let bits = u16_at(bytes, body + 14);
            fmt = Some((format_tag, channels, rate, bits));
        } else if id == b"data" {
            let (format_tag, channels, rate, bits) = fmt.ok_or(IqError::Format {
                chunk: "data",
                detail: "data chunk precedes fmt chunk".into(),
            })?;
            // WAVE_FORMAT_EXTENSIBLE carries PCM in its sub-format GUID; accept it too.
            if format_tag != 1 && format_tag != 0xFFFE {
                return Err(IqError::Format {
                    chunk: "fmt",
                    detail: format!("format tag {format_tag} is not PCM"),
                });
            }
            if channels != 2 {
                return Err(IqError::UnsupportedLayout(format!(
                    "{channels} channels (expected 2: I and Q)"
                )));
            }
            if bits != 16 {
                return Err(IqError::UnsupportedLayout(format!(
                    "{bits}-bit samples (expected 16-bit PCM)"
                )));
            }
            if rate == 0 {
                return Err(IqError::Format {
                    chunk: "fmt",
                    detail: "sample rate is zero".into(),
                });
            }
            let available = bytes.len() - body;
            if size > available {
                return Err(IqError::Truncated {
                    offset: bytes.len() as u64,
                    detail: format!("data chunk declares {size} bytes, only {available} present"),
                });
            }
            if !size.is_multiple_of(4) {
                return Err(IqError::Truncated {
                    offset: (body + size - size % 4) as u64,
                    detail: format!("data chunk size {size} is not a whole number of I/Q frames"),
                });
            }
            let data = &bytes[body..body + size];
            let samples = data
                .chunks_exact(4)
                .map(|f| {
                    let i = i16::from_le_bytes([f[0], f[1]]) as f64 / PCM16_SCALE;
                    let q = i16::from_le_bytes([f[2], f[3]]) as f64 / PCM16_SCALE;
                    Complex64::new(i, q)
                })
                .collect();
            return IqRecording::new(samples, rate as f64, origin);
        }
        // Chunks are word aligned.
        pos = body + size + (size & 1);
    }
    if fmt.is_none() {
        Err(IqError::Format {
            chunk: "fmt",
            detail: "no fmt chunk found".into(),
        })
    } else {
        Err(IqError::Format {
            chunk: "data",
            detail: "no data chunk found".into(),
        })
    }
}

pub fn load_wav_iq(path: impl AsRef<Path>) -> Result<IqRecording, IqError> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    decode_wav_iq(&bytes, Origin::File(path.to_path_buf()))
}

/// Encodes a recording as 16-bit two-channel PCM. Values are scaled by 32768
/// and saturated to the `i16` range.
pub fn encode_wav_iq(rec: &IqRecording) -> Vec<u8> {
    let rate = rec.sample_rate_hz().round() as u32;
    let data_len = rec.len() * 4;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * 4).to_le_bytes());
    out.extend_from_slice(&4u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    let quantize = |v: f64| (v * PCM16_SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
    for z in rec.samples() {
        out.extend_from_slice(&quantize(z.re).to_le_bytes());
        out.extend_from_slice(&quantize(z.im).to_le_bytes());
    }
    out
}

pub fn decode_raw_cf32(bytes: &[u8], sample_rate_hz: f64, origin: Origin) -> Result<IqRecording, IqError> {
    if !bytes.len().is_multiple_of(8) {
        return Err(IqError::Truncated {
            offset: (bytes.len() - bytes.len() % 8) as u64,
            detail: format!("length {} is not a multiple of 8 bytes", bytes.len()),
        });
    }
    let mut samples = Vec::with_capacity(bytes.len() / 8);
    for (index, pair) in bytes.chunks_exact(8).enumerate() {
        let i = f32::from_le_bytes([pair[0], pair[1], pair[2], pair[3]]);
        let q = f32::from_le_bytes([pair[4], pair[5], pair[6], pair[7]]);
        if !(i.is_finite() && q.is_finite()) {
            return Err(IqError::Decode { index });
        }
        samples.push(Complex64::new(i as f64, q as f64));
    }
    IqRecording::new(samples, sample_rate_hz, origin)
}

pub fn load_raw_cf32(path: impl AsRef<Path>, sample_rate_hz: f64) -> Result<IqRecording, IqError> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    decode_raw_cf32(&bytes, sample_rate_hz, Origin::File(path.to_path_buf()))
}

/// Serializes samples as interleaved little-endian `f32` I/Q pairs.
pub fn encode_raw_cf32(rec: &IqRecording) -> Vec<u8> {
    let mut out = Vec::with_capacity(rec.len() * 8);
    for z in rec.samples() {
        out.extend_from_slice(&(z.re as f32).to_le_bytes());
        out.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    out
}

pub fn write_raw_cf32(path: impl AsRef<Path>, rec: &IqRecording) -> Result<(), IqError> {
    let path = path.as_ref();
    let io_err = |source| IqError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(&encode_raw_cf32(rec)).map_err(io_err)
}

pub fn write_wav_iq(path: impl AsRef<Path>, rec: &IqRecording) -> Result<(), IqError> {
    let path = path.as_ref();
    fs::write(path, encode_wav_iq(rec)).map_err(|source| IqError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads `.wav` or `.cf32` by extension. `cf32_rate_hz` applies only to raw files.
pub fn load_iq(path: impl AsRef<Path>, cf32_rate_hz: f64) -> Result<IqRecording, IqError> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("wav") => load_wav_iq(path),
        Some("cf32") | Some("raw") => load_raw_cf32(path, cf32_rate_hz),
        _ => Err(IqError::Extension(path.to_path_buf())),
    }
}

/// Cuts windows of `window_s` seconds starting every `interval_s` seconds.
/// Trailing partial windows are dropped; a recording shorter than one window
/// yields no segments.
pub fn segment_fixed_cadence(rec: &IqRecording, interval_s: f64, window_s: f64) -> Result<Vec<Segment>, IqError> {
    if !(window_s > 0.0 && interval_s > 0.0 && window_s.is_finite() && interval_s.is_finite()) || window_s > interval_s {
        return Err(IqError::InvalidCadence { interval_s, window_s });
    }
    let fs = rec.sample_rate_hz();
    let win = (window_s * fs).round() as usize;
    if win == 0 {
        return Err(IqError::InvalidCadence { interval_s, window_s });
    }
    // Stepping in whole samples keeps windows disjoint; round(window) <= round(interval).
    let hop = (interval_s * fs).round() as usize;
    let mut out = Vec::new();
    for k in 0usize.. {
        let start_s = k as f64 * interval_s;
        let start = k * hop;
        if start + win > rec.len() {
            break;
        }
        out.push(Segment {
            samples: rec.samples()[start..start + win].to_vec(),
            start_s,
            label: None,
        });
    }
    Ok(out)
}
