//! Short-time Fourier transform, mean frequency profile and Welch PSD.
//!
//! IQ input is complex baseband, so the spectrum is not conjugate-symmetric
//! and all `fft_len` bins are kept: `L == fft_len`. Bin `v` corresponds to
//! `v * bin_hz` for `v < fft_len/2` and to the negative frequency
//! `(v - fft_len) * bin_hz` above that (standard DFT ordering).

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{window_coefficients, DspError, WindowKind};
use crate::iq::IqRecording;

/// Time-frequency matrix. Stored frame-major: frame `m` occupies
/// `values[m * fft_len .. (m + 1) * fft_len]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stft {
    values: Vec<Complex64>,
    fft_len: usize,
    hop: usize,
    frames: usize,
    sample_rate_hz: f64,
}

impl Stft {
    /// Builds an STFT from explicit frame columns (each of length `fft_len`).
    pub fn from_frames(frames: Vec<Vec<Complex64>>, hop: usize, sample_rate_hz: f64) -> Result<Stft, DspError> {
        let fft_len = frames.first().map(Vec::len).unwrap_or(0);
        if frames.iter().any(|f| f.len() != fft_len) {
            return Err(DspError::Geometry { fft_len, hop });
        }
        let m = frames.len();
        Ok(Stft {
            values: frames.into_iter().flatten().collect(),
            fft_len,
            hop,
            frames: m,
            sample_rate_hz,
        })
    }

    /// Number of frequency bins, `L`.
    pub fn bins(&self) -> usize {
        self.fft_len
    }

    /// Number of time frames, `M`.
    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn bin_hz(&self) -> f64 {
        self.sample_rate_hz / self.fft_len as f64
    }

    /// `STFT(v, m)`.
    pub fn value(&self, bin: usize, frame: usize) -> Complex64 {
        self.values[frame * self.fft_len + bin]
    }

    pub fn frame(&self, frame: usize) -> &[Complex64] {
        &self.values[frame * self.fft_len..(frame + 1) * self.fft_len]
    }
}

/// Per-bin mean STFT magnitude over time.
#[derive(Debug, Clone, PartialEq)]
pub struct Mfp {
    pub values: Vec<f64>,
    pub bin_hz: f64,
}

/// Reusable windowed-FFT engine. Computes STFTs and MFPs with a cached FFT
/// plan; the MFP path streams frames and never materialises the full matrix.
#[derive(Clone)]
pub struct MfpExtractor {
    fft: Arc<dyn Fft<f64>>,
    window: Vec<f64>,
    fft_len: usize,
    hop: usize,
}

impl std::fmt::Debug for MfpExtractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MfpExtractor")
            .field("fft_len", &self.fft_len)
            .field("hop", &self.hop)
            .finish()
    }
}

impl MfpExtractor {
    pub fn new(fft_len: usize, hop: usize, window: WindowKind) -> Result<Self, DspError> {
        if fft_len < 2 || hop == 0 || hop > fft_len {
            return Err(DspError::Geometry { fft_len, hop });
        }
        let fft = FftPlanner::new().plan_fft_forward(fft_len);
        Ok(MfpExtractor {
            fft,
            window: window_coefficients(window, fft_len)?,
            fft_len,
            hop,
        })
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn frame_count(&self, len: usize) -> usize {
        if len < self.fft_len {
            0
        } else {
            (len - self.fft_len) / self.hop + 1
        }
    }

    fn check_len(&self, len: usize) -> Result<usize, DspError> {
        match self.frame_count(len) {
            0 => Err(DspError::EmptyStft {
                len,
                fft_len: self.fft_len,
            }),
            m => Ok(m),
        }
    }

    /// Calls `visit` with each transformed frame in order.
    fn for_each_frame(&self, samples: &[Complex64], mut visit: impl FnMut(&[Complex64])) -> Result<usize, DspError> {
        let frames = self.check_len(samples.len())?;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_len];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        for m in 0..frames {
            let start = m * self.hop;
            for ((dst, &x), &w) in buf.iter_mut().zip(&samples[start..start + self.fft_len]).zip(&self.window) {
                *dst = x * w;
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            visit(&buf);
        }
        Ok(frames)
    }

    pub fn stft(&self, samples: &[Complex64], sample_rate_hz: f64) -> Result<Stft, DspError> {
        let mut values = Vec::with_capacity(self.frame_count(samples.len()) * self.fft_len);
        let frames = self.for_each_frame(samples, |f| values.extend_from_slice(f))?;
        Ok(Stft {
            values,
            fft_len: self.fft_len,
            hop: self.hop,
            frames,
            sample_rate_hz,
        })
    }

    /// Streaming equivalent of `mean_frequency_profile(stft(..))`; the
    /// summation order over frames is identical, so results match bit for bit.
    pub fn mfp(&self, samples: &[Complex64], sample_rate_hz: f64) -> Result<Mfp, DspError> {
        let mut acc = vec![0.0f64; self.fft_len];
        let frames = self.for_each_frame(samples, |f| {
            for (a, z) in acc.iter_mut().zip(f) {
                *a += magnitude(z);
            }
        })?;
        let inv = frames as f64;
        acc.iter_mut().for_each(|a| *a /= inv);
        Ok(Mfp {
            values: acc,
            bin_hz: sample_rate_hz / self.fft_len as f64,
        })
    }

    /// Averaged squared magnitudes of the windowed frames, without normalization.
    fn mean_power(&self, samples: &[Complex64]) -> Result<Vec<f64>, DspError> {
        let mut acc = vec![0.0f64; self.fft_len];
        let frames = self.for_each_frame(samples, |f| {
            for (a, z) in acc.iter_mut().zip(f) {
                *a += z.norm_sqr();
            }
        })?;
        acc.iter_mut().for_each(|a| *a /= frames as f64);
        Ok(acc)
    }

    fn window_energy(&self) -> f64 {
        self.window.iter().map(|w| w * w).sum()
    }
}

/// `|z|` without `hypot`'s overflow guard; STFT magnitudes stay far from
/// the f64 limits.
#[inline]
fn magnitude(z: &Complex64) -> f64 {
    z.norm_sqr().sqrt()
}

/// `values[v][m] = Σ_n w[n] x[m·hop + n] exp(-2πi v n / fft_len)`.
pub fn stft(samples: &[Complex64], fft_len: usize, hop: usize, window: WindowKind, sample_rate_hz: f64) -> Result<Stft, DspError> {
    MfpExtractor::new(fft_len, hop, window)?.stft(samples, sample_rate_hz)
}

/// `MFP(v) = (1/M) Σ_m |STFT(v, m)|`.
pub fn mean_frequency_profile(s: &Stft) -> Result<Mfp, DspError> {
    if s.frames == 0 || s.fft_len == 0 {
        return Err(DspError::EmptyInput);
    }
    let mut acc = vec![0.0f64; s.fft_len];
    for m in 0..s.frames {
        for (a, z) in acc.iter_mut().zip(s.frame(m)) {
            *a += magnitude(z);
        }
    }
    let inv = s.frames as f64;
    acc.iter_mut().for_each(|a| *a /= inv);
    Ok(Mfp {
        values: acc,
        bin_hz: s.bin_hz(),
    })
}

/// Two-sided Welch PSD with 50% overlap, in units of power per Hz:
/// `P(v) = mean_m |X_m(v)|^2 / (fs · Σ w²)`.
pub fn welch_psd(rec: &IqRecording, fft_len: usize, window: WindowKind) -> Result<Vec<f64>, DspError> {
    let ex = MfpExtractor::new(fft_len, (fft_len / 2).max(1), window)?;
    let scale = 1.0 / (rec.sample_rate_hz() * ex.window_energy());
    let mut p = ex.mean_power(rec.samples())?;
    p.iter_mut().for_each(|v| *v *= scale);
    Ok(p)
}
