//! Signal-processing kernels.

mod butterworth;
mod spectral;
mod window;

pub use butterworth::{apply_filter, design_butterworth_bandpass, BandpassSpec, Biquad, SosFilter};
pub use spectral::{
    mean_frequency_profile, stft, welch_psd, Mfp, MfpExtractor, Stft,
};
pub use window::{window_coefficients, WindowKind};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DspError {
    #[error("filter design: {0}")]
    Design(String),
    #[error("window length {0} is below the minimum of 2")]
    WindowSize(usize),
    #[error("input of {len} samples is shorter than one {fft_len}-sample frame")]
    EmptyStft { len: usize, fft_len: usize },
    #[error("invalid STFT geometry: fft_len {fft_len}, hop {hop}")]
    Geometry { fft_len: usize, hop: usize },
    #[error("STFT has no frames")]
    EmptyInput,
    #[error("unknown window kind {0:?}")]
    UnknownWindow(String),
}
