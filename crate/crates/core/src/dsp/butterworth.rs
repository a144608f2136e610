//! Butterworth band-pass design in second-order-section form.
//!
//! Analog low-pass prototype poles are mapped to a band-pass (each pole
//! becomes a pair), prewarped so the digital -3 dB points land exactly on
//! the requested cut-offs, and discretized with the bilinear transform. The
//! band-pass has `order` zeros at DC and `order` zeros at Nyquist, so every
//! section shares the numerator `[1, 0, -1]` up to gain.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::DspError;
use crate::iq::{IqRecording, Origin};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandpassSpec {
    pub low_cut_hz: f64,
    pub high_cut_hz: f64,
    /// Prototype low-pass order; the band-pass has twice as many poles.
    pub order: usize,
}

impl BandpassSpec {
    pub fn new(low_cut_hz: f64, high_cut_hz: f64, order: usize) -> Self {
        BandpassSpec {
            low_cut_hz,
            high_cut_hz,
            order,
        }
    }
}

/// One biquad, `H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    /// Poles strictly inside the unit circle (stability triangle).
    pub fn is_stable(&self) -> bool {
        self.a2.abs() < 1.0 && self.a1.abs() < 1.0 + self.a2
    }

    pub fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        (self.b0 + self.b1 * z_inv + self.b2 * z2) / (1.0 + self.a1 * z_inv + self.a2 * z2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SosFilter {
    pub sections: Vec<Biquad>,
}

impl SosFilter {
    pub fn is_stable(&self) -> bool {
        self.sections.iter().all(Biquad::is_stable)
    }

    /// Complex frequency response at `freq_hz`.
    pub fn response(&self, freq_hz: f64, sample_rate_hz: f64) -> Complex64 {
        let z_inv = Complex64::from_polar(1.0, -2.0 * PI * freq_hz / sample_rate_hz);
        self.sections.iter().map(|s| s.response(z_inv)).product()
    }

    pub fn magnitude_db(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        20.0 * self.response(freq_hz, sample_rate_hz).norm().log10()
    }

    /// Runs the cascade over a complex sequence with zero initial state.
    pub fn filter(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut out = input.to_vec();
        self.filter_in_place(&mut out);
        out
    }

    pub fn filter_in_place(&self, data: &mut [Complex64]) {
        // Transposed direct form II, one section at a time over the whole buffer.
        for s in &self.sections {
            let mut z1 = Complex64::new(0.0, 0.0);
            let mut z2 = Complex64::new(0.0, 0.0);
            for x in data.iter_mut() {
                let input = *x;
                let y = s.b0 * input + z1;
                z1 = s.b1 * input - s.a1 * y + z2;
                z2 = s.b2 * input - s.a2 * y;
                *x = y;
            }
        }
    }
}

pub fn design_butterworth_bandpass(spec: &BandpassSpec, sample_rate_hz: f64) -> Result<SosFilter, DspError> {
    let nyquist = sample_rate_hz / 2.0;
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(DspError::Design(format!("invalid sample rate {sample_rate_hz}")));
    }
    if !(spec.low_cut_hz > 0.0 && spec.low_cut_hz < spec.high_cut_hz && spec.high_cut_hz < nyquist) {
        return Err(DspError::Design(format!(
            "need 0 < low ({}) < high ({}) < Nyquist ({nyquist}) Hz",
            spec.low_cut_hz, spec.high_cut_hz
        )));
    }
    if spec.order == 0 {
        return Err(DspError::Design("order must be at least 1".into()));
    }

    let n = spec.order;
    let fs2 = 2.0 * sample_rate_hz;
    let w_lo = fs2 * (PI * spec.low_cut_hz / sample_rate_hz).tan();
    let w_hi = fs2 * (PI * spec.high_cut_hz / sample_rate_hz).tan();
    let bw = w_hi - w_lo;
    let w0_sq = w_lo * w_hi;

    // Low-pass prototype poles on the left half of the unit circle; each maps
    // to two band-pass poles, roots of s^2 - p*bw*s + w0^2.
    let mut analog_poles = Vec::with_capacity(2 * n);
    for k in 0..n {
        let theta = PI * (2 * k + n + 1) as f64 / (2 * n) as f64;
        let p = if 2 * k + 1 == n {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, theta)
        };
        let half = p * (bw / 2.0);
        let disc = (half * half - w0_sq).sqrt();
        analog_poles.push(half + disc);
        analog_poles.push(half - disc);
    }

    let digital: Vec<Complex64> = analog_poles
        .iter()
        .map(|&s| (fs2 + s) / (fs2 - s))
        .collect();

    // Complex poles contribute one section per conjugate pair. For odd orders
    // the real prototype pole maps to either a conjugate pair or, for wide
    // bands, two real poles that share a section.
    let mut upper: Vec<Complex64> = Vec::with_capacity(n);
    let mut real: Vec<f64> = Vec::new();
    for p in &digital {
        if p.im.abs() <= 1e-12 * p.norm().max(1.0) {
            real.push(p.re);
        } else if p.im > 0.0 {
            upper.push(*p);
        }
    }
    if !real.len().is_multiple_of(2) || upper.len() + real.len() / 2 != n {
        return Err(DspError::Design(format!(
            "pole bookkeeping failed: {} complex pairs, {} real poles for order {n}",
            upper.len(),
            real.len()
        )));
    }
    // Deterministic section order: poles nearest the unit circle last.
    upper.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    real.sort_by(f64::total_cmp);

    let section = |a1: f64, a2: f64| Biquad {
        b0: 1.0,
        b1: 0.0,
        b2: -1.0,
        a1,
        a2,
    };
    let mut sections: Vec<Biquad> = real
        .chunks_exact(2)
        .map(|r| section(-(r[0] + r[1]), r[0] * r[1]))
        .collect();
    sections.extend(upper.iter().map(|p| section(-2.0 * p.re, p.norm_sqr())));

    // Unit gain at the digital image of the analog band centre.
    let center_hz = sample_rate_hz / PI * (w0_sq.sqrt() / fs2).atan();
    let filter = SosFilter {
        sections: sections.clone(),
    };
    let gain = 1.0 / filter.response(center_hz, sample_rate_hz).norm();
    let per_section = gain.powf(1.0 / n as f64);
    for s in &mut sections {
        s.b0 *= per_section;
        s.b1 *= per_section;
        s.b2 *= per_section;
    }
    let filter = SosFilter { sections };
    if !filter.is_stable() {
        return Err(DspError::Design("designed cascade is not stable".into()));
    }
    Ok(filter)
}

/// Causal single-pass filtering of the complex IQ stream. Output length
/// equals input length.
pub fn apply_filter(rec: &IqRecording, filter: &SosFilter) -> IqRecording {
    let out = filter.filter(rec.samples());
    rec.with_samples(out, Origin::Derived(format!("bandpass({})", rec.origin())))
}
