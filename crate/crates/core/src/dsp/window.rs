use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::DspError;

/// Generalized-cosine tapers. Coefficients use the periodic (DFT-even) form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WindowKind {
    Hann,
    Hamming,
    Blackman,
}

impl WindowKind {
    pub const ALL: [WindowKind; 3] = [WindowKind::Hann, WindowKind::Hamming, WindowKind::Blackman];

    fn cosine_terms(self) -> (f64, f64, f64) {
        match self {
            WindowKind::Hann => (0.5, 0.5, 0.0),
            WindowKind::Hamming => (0.54, 0.46, 0.0),
            WindowKind::Blackman => (0.42, 0.5, 0.08),
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowKind::Hann => "hann",
            WindowKind::Hamming => "hamming",
            WindowKind::Blackman => "blackman",
        })
    }
}

impl FromStr for WindowKind {
    type Err = DspError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hann" | "hanning" => Ok(WindowKind::Hann),
            "hamming" => Ok(WindowKind::Hamming),
            "blackman" => Ok(WindowKind::Blackman),
            _ => Err(DspError::UnknownWindow(s.to_string())),
        }
    }
}

/// `w[n] = a0 - a1 cos(2πn/N) + a2 cos(4πn/N)` with `N = length`.
pub fn window_coefficients(kind: WindowKind, length: usize) -> Result<Vec<f64>, DspError> {
    if length < 2 {
        return Err(DspError::WindowSize(length));
    }
    let (a0, a1, a2) = kind.cosine_terms();
    let n = length as f64;
    Ok((0..length)
        .map(|i| {
            let x = 2.0 * PI * i as f64 / n;
            a0 - a1 * x.cos() + a2 * (2.0 * x).cos()
        })
        .collect())
}
