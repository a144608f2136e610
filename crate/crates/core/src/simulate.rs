//! Synthetic unintentional-emission IQ generator.
//!
//! Nothing here is measured: the default emission spectra are invented so
//! that labelled datasets can be produced without a robot or a receiver.
//! Each motor axis radiates a small set of narrowband tones while it moves;
//! the microcontroller radiates band-limited noise all the time. The Y-axis
//! motor sits next to the microcontroller, so a configurable share of its
//! power lands in the controller's band and is hard to tell apart from it.
//!
//! Movement speed scales tone amplitude as `(speed / 12.5)^speed_gain`;
//! distance sets the burst length `distance / speed`, clipped to the clip.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::dsp::{design_butterworth_bandpass, BandpassSpec};
use crate::iq::{write_raw_cf32, IqError, IqRecording, Origin};
use crate::manifest::{Manifest, ManifestRow, SampleKind};

/// Speeds used by the movement grid, mm/s.
pub const SPEEDS_MM_S: [f64; 5] = [12.5, 25.0, 50.0, 75.0, 100.0];
/// Distances used by the movement grid, mm.
pub const DISTANCES_MM: [f64; 6] = [1.0, 2.0, 5.0, 10.0, 25.0, 50.0];
pub const BASELINE_SPEED_MM_S: f64 = 12.5;
pub const BASELINE_DISTANCE_MM: f64 = 1.0;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid movement: {0}")]
    Spec(String),
    #[error("invalid emission model: {0}")]
    Model(String),
    #[error(transparent)]
    Iq(#[from] IqError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Manifest(#[from] crate::manifest::ManifestError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn bit(self) -> u8 {
        match self {
            Axis::X => 1,
            Axis::Y => 2,
            Axis::Z => 4,
        }
    }

    fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// Non-empty subset of `{X, Y, Z}`; labels are canonical (`X < Y < Z`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxisSet(u8);

impl AxisSet {
    pub fn new(axes: &[Axis]) -> Result<Self, SimError> {
        let bits = axes.iter().fold(0u8, |b, a| b | a.bit());
        if bits == 0 {
            return Err(SimError::Spec("a movement needs at least one axis".into()));
        }
        Ok(AxisSet(bits))
    }

    pub fn contains(self, axis: Axis) -> bool {
        self.0 & axis.bit() != 0
    }

    pub fn axes(self) -> impl Iterator<Item = Axis> {
        Axis::ALL.into_iter().filter(move |a| self.contains(*a))
    }

    pub fn label(self) -> String {
        self.axes().map(Axis::letter).collect()
    }

    /// The seven movement classes in report order: X, Y, Z, XY, XZ, YZ, XYZ.
    pub fn all() -> Vec<AxisSet> {
        ["X", "Y", "Z", "XY", "XZ", "YZ", "XYZ"].iter().map(|s| s.parse().unwrap()).collect()
    }
}

impl fmt::Display for AxisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for AxisSet {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut axes = Vec::new();
        for ch in s.chars() {
            axes.push(match ch.to_ascii_uppercase() {
                'X' => Axis::X,
                'Y' => Axis::Y,
                'Z' => Axis::Z,
                _ => return Err(SimError::Spec(format!("unknown axis {ch:?} in {s:?}"))),
            });
        }
        AxisSet::new(&axes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovementSpec {
    pub axes: AxisSet,
    pub speed_mm_s: f64,
    pub distance_mm: f64,
}

impl MovementSpec {
    /// Speed and distance must come from [`SPEEDS_MM_S`] and [`DISTANCES_MM`].
    pub fn new(axes: AxisSet, speed_mm_s: f64, distance_mm: f64) -> Result<Self, SimError> {
        if !SPEEDS_MM_S.contains(&speed_mm_s) {
            return Err(SimError::Spec(format!("speed {speed_mm_s} mm/s not in {SPEEDS_MM_S:?}")));
        }
        if !DISTANCES_MM.contains(&distance_mm) {
            return Err(SimError::Spec(format!("distance {distance_mm} mm not in {DISTANCES_MM:?}")));
        }
        Ok(MovementSpec {
            axes,
            speed_mm_s,
            distance_mm,
        })
    }

    pub fn baseline(axes: AxisSet) -> Self {
        MovementSpec {
            axes,
            speed_mm_s: BASELINE_SPEED_MM_S,
            distance_mm: BASELINE_DISTANCE_MM,
        }
    }

    pub fn label(&self) -> String {
        self.axes.label()
    }

    pub fn nominal_duration_s(&self) -> f64 {
        self.distance_mm / self.speed_mm_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub center_hz: f64,
    pub amplitude: f64,
    /// Per-recording carrier offset drawn uniformly from `±drift_hz`.
    pub drift_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadbandSource {
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    /// In-band power.
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmissionModel {
    pub x_tones: Vec<Tone>,
    pub y_tones: Vec<Tone>,
    pub z_tones: Vec<Tone>,
    pub mcu: BroadbandSource,
    /// Share of the Y motor's power that falls into the MCU band, in `[0, 1]`.
    pub y_mcu_overlap: f64,
    pub speed_gain: f64,
    pub distance_maps_to_duration: bool,
    /// White-noise power in dB relative to a unit-amplitude tone;
    /// `-inf` disables it. -20 dB is a 20 dB SNR for a unit tone.
    pub noise_floor_db: f64,
}

fn tones(centers_khz: &[f64]) -> Vec<Tone> {
    centers_khz
        .iter()
        .map(|&k| Tone {
            center_hz: k * 1e3,
            amplitude: 1.0,
            drift_hz: 200.0,
        })
        .collect()
}

impl Default for EmissionModel {
    fn default() -> Self {
        EmissionModel {
            x_tones: tones(&[110.0, 170.0, 230.0]),
            y_tones: tones(&[90.0, 150.0, 210.0]),
            z_tones: tones(&[130.0, 190.0, 250.0]),
            mcu: BroadbandSource {
                band_low_hz: 40e3,
                band_high_hz: 80e3,
                power: 0.5,
            },
            y_mcu_overlap: 0.5,
            speed_gain: 1.0,
            distance_maps_to_duration: true,
            noise_floor_db: -20.0,
        }
    }
}

impl EmissionModel {
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.noise_floor_db = -snr_db;
        self
    }

    /// Model with only the listed axis tones and no broadband or white noise.
    pub fn noiseless(mut self) -> Self {
        self.noise_floor_db = f64::NEG_INFINITY;
        self.mcu.power = 0.0;
        self
    }

    pub fn tones_for(&self, axis: Axis) -> &[Tone] {
        match axis {
            Axis::X => &self.x_tones,
            Axis::Y => &self.y_tones,
            Axis::Z => &self.z_tones,
        }
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<(), SimError> {
        let nyq = sample_rate_hz / 2.0;
        for axis in Axis::ALL {
            for t in self.tones_for(axis) {
                if !(t.center_hz > 0.0 && t.center_hz + t.drift_hz.abs() < nyq) {
                    return Err(SimError::Model(format!("{axis:?} tone at {} Hz outside (0, {nyq})", t.center_hz)));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.y_mcu_overlap) {
            return Err(SimError::Model(format!("overlap {} outside [0, 1]", self.y_mcu_overlap)));
        }
        if self.mcu.power < 0.0 || !(self.mcu.band_low_hz > 0.0 && self.mcu.band_low_hz < self.mcu.band_high_hz && self.mcu.band_high_hz < nyq) {
            return Err(SimError::Model("MCU band must satisfy 0 < low < high < Nyquist with power >= 0".into()));
        }
        if self.noise_floor_db.is_nan() || self.noise_floor_db == f64::INFINITY {
            return Err(SimError::Model("noise floor must be finite or -inf".into()));
        }
        Ok(())
    }

    fn amplitude_scale(&self, spec: &MovementSpec) -> f64 {
        (spec.speed_mm_s / BASELINE_SPEED_MM_S).powf(self.speed_gain)
    }

    fn burst_len(&self, spec: &MovementSpec, sample_rate_hz: f64, n: usize) -> usize {
        if self.distance_maps_to_duration {
            ((spec.nominal_duration_s() * sample_rate_hz).round() as usize).clamp(1, n)
        } else {
            n
        }
    }

    /// Expected tone energy of a movement burst (sum of `a² · samples`).
    pub fn burst_energy(&self, spec: &MovementSpec, sample_rate_hz: f64, duration_s: f64) -> f64 {
        let n = (duration_s * sample_rate_hz).round() as usize;
        let scale = self.amplitude_scale(spec);
        let len = self.burst_len(spec, sample_rate_hz, n.max(1)) as f64;
        spec.axes
            .axes()
            .flat_map(|a| self.tones_for(a).iter().map(move |t| (a, t)))
            .map(|(a, t)| {
                let share = if a == Axis::Y { 1.0 - self.y_mcu_overlap } else { 1.0 };
                (t.amplitude * scale).powi(2) * share * len
            })
            .sum()
    }

    /// Human-readable description written next to generated datasets.
    pub fn describe(&self) -> String {
        let fmt_tones = |ts: &[Tone]| {
            ts.iter()
                .map(|t| format!("{}Hz@{}±{}Hz", t.center_hz, t.amplitude, t.drift_hz))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "synthetic=true\nnote=spectral parameters are synthetic, not measured\nx_tones={}\ny_tones={}\nz_tones={}\nmcu_band_hz={}-{}\nmcu_power={}\ny_mcu_overlap={}\nspeed_gain={}\ndistance_maps_to_duration={}\nnoise_floor_db={}\n",
            fmt_tones(&self.x_tones),
            fmt_tones(&self.y_tones),
            fmt_tones(&self.z_tones),
            self.mcu.band_low_hz,
            self.mcu.band_high_hz,
            self.mcu.power,
            self.y_mcu_overlap,
            self.speed_gain,
            self.distance_maps_to_duration,
            self.noise_floor_db
        )
    }
}

/// SplitMix64 finalizer; derives independent child seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian(rng: &mut ChaCha8Rng, std: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std, im * std)
}

/// Adds `amplitude · exp(i(2π f n / fs + phase))` over `range`.
fn add_tone(buf: &mut [Complex64], start: usize, freq_hz: f64, amplitude: f64, phase: f64, fs: f64) {
    // Rotating phasor, re-anchored periodically to bound rounding drift.
    const ANCHOR: usize = 4096;
    let w = 2.0 * PI * freq_hz / fs;
    let step = Complex64::from_polar(1.0, w);
    for (block, chunk) in buf.chunks_mut(ANCHOR).enumerate() {
        let n0 = (start + block * ANCHOR) as f64;
        let mut z = Complex64::from_polar(amplitude, w * n0 + phase);
        for x in chunk {
            *x += z;
            z *= step;
        }
    }
}

/// Ambient emissions: MCU band noise with an optional extra power during
/// `extra` (start, len, power), plus white noise.
fn add_background(buf: &mut [Complex64], model: &EmissionModel, fs: f64, extra: Option<(usize, usize, f64)>, rng: &mut ChaCha8Rng) -> Result<(), SimError> {
    let n = buf.len();
    let has_mcu = model.mcu.power > 0.0 || extra.is_some_and(|e| e.2 > 0.0);
    if has_mcu && n > 0 {
        // A real-coefficient band-pass passes both ±band, so white input of
        // variance σ² leaves σ²·2B/fs in band.
        let bw = model.mcu.band_high_hz - model.mcu.band_low_hz;
        let gain_to_input = fs / (2.0 * bw);
        let filter = design_butterworth_bandpass(&BandpassSpec::new(model.mcu.band_low_hz, model.mcu.band_high_hz, 2), fs)
            .map_err(|e| SimError::Model(e.to_string()))?;
        let base_std = (model.mcu.power * gain_to_input).sqrt();
        let mut noise: Vec<Complex64> = (0..n)
            .map(|i| {
                let mut std = base_std;
                if let Some((s, len, p)) = extra {
                    if i >= s && i < s + len {
                        std = ((model.mcu.power + p) * gain_to_input).sqrt();
                    }
                }
                gaussian(rng, std)
            })
            .collect();
        filter.filter_in_place(&mut noise);
        for (b, v) in buf.iter_mut().zip(noise) {
            *b += v;
        }
    }
    if model.noise_floor_db.is_finite() {
        let std = (10f64.powf(model.noise_floor_db / 10.0) / 2.0).sqrt();
        for b in buf.iter_mut() {
            *b += gaussian(rng, std);
        }
    }
    Ok(())
}

pub fn synth_movement(spec: &MovementSpec, model: &EmissionModel, sample_rate_hz: f64, duration_s: f64, seed: u64) -> Result<IqRecording, SimError> {
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(SimError::Spec(format!("duration must be positive, got {duration_s}")));
    }
    model.validate(sample_rate_hz)?;
    let n = ((duration_s * sample_rate_hz).round() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burst = model.burst_len(spec, sample_rate_hz, n);
    let start = rng.gen_range(0..=n - burst);
    let scale = model.amplitude_scale(spec);

    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut y_power = 0.0;
    for axis in spec.axes.axes() {
        let share = if axis == Axis::Y { 1.0 - model.y_mcu_overlap } else { 1.0 };
        for tone in model.tones_for(axis) {
            let drift = tone.drift_hz * (2.0 * rng.gen::<f64>() - 1.0);
            let phase = 2.0 * PI * rng.gen::<f64>();
            let amp = tone.amplitude * scale;
            add_tone(&mut buf[start..start + burst], start, tone.center_hz + drift, amp * share.sqrt(), phase, sample_rate_hz);
            if axis == Axis::Y {
                y_power += amp * amp * model.y_mcu_overlap;
            }
        }
    }
    let extra = (y_power > 0.0).then_some((start, burst, y_power));
    add_background(&mut buf, model, sample_rate_hz, extra, &mut rng)?;
    Ok(IqRecording::new(buf, sample_rate_hz, Origin::Simulated { seed })?)
}

/// Background-only recording (no motor activity).
pub fn synth_idle(model: &EmissionModel, sample_rate_hz: f64, duration_s: f64, seed: u64) -> Result<IqRecording, SimError> {
    model.validate(sample_rate_hz)?;
    let n = (duration_s * sample_rate_hz).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    add_background(&mut buf, model, sample_rate_hz, None, &mut rng)?;
    Ok(IqRecording::new(buf, sample_rate_hz, Origin::Simulated { seed })?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorkflowKind {
    Push,
    Pull,
    PickAndPlace,
    Packing,
}

impl WorkflowKind {
    pub const ALL: [WorkflowKind; 4] = [WorkflowKind::Push, WorkflowKind::Pull, WorkflowKind::PickAndPlace, WorkflowKind::Packing];

    pub fn label(self) -> &'static str {
        match self {
            WorkflowKind::Push => "Push",
            WorkflowKind::Pull => "Pull",
            WorkflowKind::PickAndPlace => "Pick-and-Place",
            WorkflowKind::Packing => "Packing",
        }
    }

    /// Characteristic step sequence `(axes, speed, distance)`.
    fn template(self) -> &'static [(&'static str, f64, f64)] {
        match self {
            // lower, push the load forward slowly, raise
            WorkflowKind::Push => &[("Z", 25.0, 10.0), ("X", 12.5, 25.0), ("Z", 25.0, 10.0)],
            // the same legs, but the arm drags the load back quickly
            WorkflowKind::Pull => &[("Z", 50.0, 10.0), ("X", 50.0, 25.0), ("Z", 50.0, 10.0)],
            WorkflowKind::PickAndPlace => &[
                ("Z", 50.0, 25.0),
                ("XZ", 25.0, 5.0),
                ("Z", 50.0, 25.0),
                ("Y", 75.0, 50.0),
                ("Z", 50.0, 25.0),
                ("Z", 50.0, 25.0),
            ],
            WorkflowKind::Packing => &[
                ("Y", 50.0, 25.0),
                ("Z", 50.0, 25.0),
                ("XZ", 25.0, 5.0),
                ("Z", 50.0, 25.0),
                ("Y", 50.0, 25.0),
                ("X", 25.0, 10.0),
                ("Z", 25.0, 10.0),
            ],
        }
    }
}

impl fmt::Display for WorkflowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for WorkflowKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match norm.as_str() {
            "push" => Ok(WorkflowKind::Push),
            "pull" => Ok(WorkflowKind::Pull),
            "pickandplace" => Ok(WorkflowKind::PickAndPlace),
            "packing" => Ok(WorkflowKind::Packing),
            _ => Err(SimError::Spec(format!("unknown workflow {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkflowSpec {
    pub kind: WorkflowKind,
    pub steps: Vec<MovementSpec>,
    pub set_id: u8,
    /// Idle time before, between and after steps.
    pub gap_s: f64,
    /// Longest time a single step is simulated for.
    pub max_step_s: f64,
}

impl WorkflowSpec {
    pub fn new(kind: WorkflowKind, set_id: u8) -> Self {
        let steps = kind
            .template()
            .iter()
            .map(|&(axes, speed, dist)| MovementSpec::new(axes.parse().unwrap(), speed, dist).unwrap())
            .collect();
        WorkflowSpec {
            kind,
            steps,
            set_id,
            gap_s: 0.02,
            max_step_s: 0.08,
        }
    }

    pub fn step_duration_s(&self, step: &MovementSpec) -> f64 {
        step.nominal_duration_s().min(self.max_step_s)
    }

    pub fn total_duration_s(&self) -> f64 {
        self.gap_s * (self.steps.len() + 1) as f64 + self.steps.iter().map(|s| self.step_duration_s(s)).sum::<f64>()
    }
}

/// Concatenates idle gaps and per-step movement signals:
/// `gap, step_1, gap, step_2, ..., step_n, gap`. Segment `j` (gaps and steps
/// counted together) is generated with seed `derive_seed(seed, j)`.
pub fn synth_workflow(spec: &WorkflowSpec, model: &EmissionModel, sample_rate_hz: f64, seed: u64) -> Result<IqRecording, SimError> {
    if spec.steps.is_empty() {
        return Err(SimError::Spec("workflow has no steps".into()));
    }
    let mut out = Vec::new();
    let mut part = 0u64;
    let push_idle = |out: &mut Vec<Complex64>, part: &mut u64| -> Result<(), SimError> {
        let idle = synth_idle(model, sample_rate_hz, spec.gap_s, derive_seed(seed, *part))?;
        out.extend_from_slice(idle.samples());
        *part += 1;
        Ok(())
    };
    push_idle(&mut out, &mut part)?;
    for step in &spec.steps {
        let rec = synth_movement(step, model, sample_rate_hz, spec.step_duration_s(step), derive_seed(seed, part))?;
        out.extend_from_slice(rec.samples());
        part += 1;
        push_idle(&mut out, &mut part)?;
    }
    Ok(IqRecording::new(out, sample_rate_hz, Origin::Simulated { seed })?)
}

/// Augmentation jitter ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jitter {
    pub amp_jitter_pct: f64,
    pub time_jitter_s: f64,
    pub freq_jitter_hz: f64,
}

impl Default for Jitter {
    fn default() -> Self {
        Jitter {
            amp_jitter_pct: 5.0,
            time_jitter_s: 0.010,
            freq_jitter_hz: 100.0,
        }
    }
}

impl Jitter {
    pub fn none() -> Self {
        Jitter {
            amp_jitter_pct: 0.0,
            time_jitter_s: 0.0,
            freq_jitter_hz: 0.0,
        }
    }
}

/// Random amplitude scaling, circular time shift and frequency offset,
/// each drawn uniformly from its symmetric jitter range. Length is kept.
pub fn perturb(rec: &IqRecording, jitter: &Jitter, seed: u64) -> IqRecording {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |range: f64| range.abs() * (2.0 * rng.gen::<f64>() - 1.0);
    let gain = 1.0 + draw(jitter.amp_jitter_pct) / 100.0;
    let shift_s = draw(jitter.time_jitter_s);
    let offset_hz = draw(jitter.freq_jitter_hz);

    let fs = rec.sample_rate_hz();
    let mut samples = rec.samples().to_vec();
    if gain != 1.0 {
        samples.iter_mut().for_each(|z| *z *= gain);
    }
    let n = samples.len();
    let shift = (shift_s * fs).round() as i64;
    if n > 0 && shift != 0 {
        let k = shift.rem_euclid(n as i64) as usize;
        samples.rotate_right(k);
    }
    if offset_hz != 0.0 {
        add_rotation(&mut samples, offset_hz, fs);
    }
    rec.with_samples(samples, Origin::Derived(format!("perturb({}, seed={seed})", rec.origin())))
}

fn add_rotation(samples: &mut [Complex64], offset_hz: f64, fs: f64) {
    let w = 2.0 * PI * offset_hz / fs;
    for (i, z) in samples.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, w * i as f64);
    }
}

/// Which movement cells to generate.
#[derive(Debug, Clone, PartialEq)]
pub struct MovementGrid {
    pub classes: Vec<AxisSet>,
    pub distances_mm: Vec<f64>,
    pub speeds_mm_s: Vec<f64>,
    pub reps: usize,
}

/// Recording conditions for one workflow capture set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetConditions {
    pub set_id: u8,
    pub snr_db: f64,
    pub jitter: Option<Jitter>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkflowGrid {
    pub kinds: Vec<WorkflowKind>,
    pub sets: Vec<SetConditions>,
    pub reps: usize,
}

impl WorkflowGrid {
    /// Set 1 clean at 30 dB; sets 2 and 3 at 20 dB with default jitter.
    pub fn standard(reps: usize) -> Self {
        WorkflowGrid {
            kinds: WorkflowKind::ALL.to_vec(),
            sets: vec![
                SetConditions { set_id: 1, snr_db: 30.0, jitter: None },
                SetConditions { set_id: 2, snr_db: 20.0, jitter: Some(Jitter::default()) },
                SetConditions { set_id: 3, snr_db: 20.0, jitter: Some(Jitter::default()) },
            ],
            reps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub sample_rate_hz: f64,
    /// Length of each movement recording.
    pub movement_duration_s: f64,
    pub model: EmissionModel,
    pub movements: Option<MovementGrid>,
    pub workflows: Option<WorkflowGrid>,
    pub seed: u64,
}

/// Default movement clip length. Long enough for 60 frames of a
/// 16384-point STFT at 2 MHz.
pub const DEFAULT_MOVEMENT_DURATION_S: f64 = 0.25;

impl DatasetConfig {
    /// Desk-scale default: every movement cell once, 3 workflow reps per set.
    pub fn desk(seed: u64) -> Self {
        DatasetConfig {
            sample_rate_hz: 2e6,
            movement_duration_s: DEFAULT_MOVEMENT_DURATION_S,
            model: EmissionModel::default(),
            movements: Some(MovementGrid {
                classes: AxisSet::all(),
                distances_mm: DISTANCES_MM.to_vec(),
                speeds_mm_s: SPEEDS_MM_S.to_vec(),
                reps: 1,
            }),
            workflows: Some(WorkflowGrid::standard(3)),
            seed,
        }
    }

    /// 7 × 6 × 5 × 38 = 7980 movement clips and 4 × 3 × 33 = 396 workflows.
    pub fn paper_scale(seed: u64) -> Self {
        let mut cfg = DatasetConfig::desk(seed);
        cfg.movements.as_mut().unwrap().reps = 38;
        cfg.workflows = Some(WorkflowGrid::standard(33));
        cfg
    }

    /// Every sample the configuration describes, in manifest order.
    pub fn plan(&self) -> Vec<PlannedSample> {
        let mut out = Vec::new();
        if let Some(g) = &self.movements {
            for axes in &g.classes {
                for &d in &g.distances_mm {
                    for &s in &g.speeds_mm_s {
                        for rep in 0..g.reps {
                            out.push(PlannedSample::Movement {
                                spec: MovementSpec { axes: *axes, speed_mm_s: s, distance_mm: d },
                                rep,
                                seed: 0,
                            });
                        }
                    }
                }
            }
        }
        if let Some(g) = &self.workflows {
            for cond in &g.sets {
                for kind in &g.kinds {
                    for rep in 0..g.reps {
                        out.push(PlannedSample::Workflow {
                            spec: WorkflowSpec::new(*kind, cond.set_id),
                            conditions: *cond,
                            rep,
                            seed: 0,
                        });
                    }
                }
            }
        }
        for (i, p) in out.iter_mut().enumerate() {
            let s = derive_seed(self.seed, i as u64);
            match p {
                PlannedSample::Movement { seed, .. } | PlannedSample::Workflow { seed, .. } => *seed = s,
            }
        }
        out
    }

    pub fn render(&self, sample: &PlannedSample) -> Result<IqRecording, SimError> {
        match sample {
            PlannedSample::Movement { spec, seed, .. } => synth_movement(spec, &self.model, self.sample_rate_hz, self.movement_duration_s, *seed),
            PlannedSample::Workflow { spec, conditions, seed, .. } => {
                let model = self.model.clone().with_snr_db(conditions.snr_db);
                let rec = synth_workflow(spec, &model, self.sample_rate_hz, *seed)?;
                Ok(match &conditions.jitter {
                    Some(j) => perturb(&rec, j, derive_seed(*seed, u64::MAX)),
                    None => rec,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlannedSample {
    Movement { spec: MovementSpec, rep: usize, seed: u64 },
    Workflow { spec: WorkflowSpec, conditions: SetConditions, rep: usize, seed: u64 },
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

impl PlannedSample {
    pub fn label(&self) -> String {
        match self {
            PlannedSample::Movement { spec, .. } => spec.label(),
            PlannedSample::Workflow { spec, .. } => spec.kind.label().to_string(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            PlannedSample::Movement { seed, .. } | PlannedSample::Workflow { seed, .. } => *seed,
        }
    }

    /// Relative output path of the sample's IQ file.
    pub fn relative_path(&self) -> String {
        match self {
            PlannedSample::Movement { spec, rep, .. } => format!(
                "movements/{}_d{}_s{}_r{:03}.cf32",
                spec.label(),
                fmt_num(spec.distance_mm),
                fmt_num(spec.speed_mm_s),
                rep
            ),
            PlannedSample::Workflow { spec, rep, .. } => {
                format!("workflows/set{}/{}_r{:03}.cf32", spec.set_id, spec.kind.label(), rep)
            }
        }
    }

    pub fn manifest_row(&self) -> ManifestRow {
        match self {
            PlannedSample::Movement { spec, seed, .. } => ManifestRow {
                path: self.relative_path(),
                label: spec.label(),
                kind: SampleKind::Movement,
                speed_mm_s: Some(spec.speed_mm_s),
                distance_mm: Some(spec.distance_mm),
                workflow: None,
                set_id: None,
                seed: *seed,
            },
            PlannedSample::Workflow { spec, seed, .. } => ManifestRow {
                path: self.relative_path(),
                label: spec.kind.label().to_string(),
                kind: SampleKind::Workflow,
                speed_mm_s: None,
                distance_mm: None,
                workflow: Some(spec.kind.label().to_string()),
                set_id: Some(spec.set_id),
                seed: *seed,
            },
        }
    }
}

/// File name of the manifest inside a generated dataset directory.
pub const MANIFEST_FILE: &str = "manifest.csv";
/// Metadata file recording that the data are synthetic and how they were made.
pub const SIMULATION_META_FILE: &str = "simulation.txt";

/// Writes one `.cf32` file per planned sample plus `manifest.csv` and a
/// metadata file. Rows are written in plan order.
pub fn generate_dataset(config: &DatasetConfig, out_dir: impl AsRef<Path>) -> Result<Manifest, SimError> {
    let out_dir = out_dir.as_ref();
    let plan = config.plan();
    let mut rows = Vec::with_capacity(plan.len());
    for sample in &plan {
        let rel = sample.relative_path();
        let path = out_dir.join(&rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| SimError::Write { path: parent.to_path_buf(), source })?;
        }
        let rec = config.render(sample)?;
        write_raw_cf32(&path, &rec)?;
        rows.push(sample.manifest_row());
    }
    let manifest = Manifest::new(rows);
    manifest.write(out_dir.join(MANIFEST_FILE))?;
    let meta_path = out_dir.join(SIMULATION_META_FILE);
    let meta = format!(
        "{}sample_rate_hz={}\nmovement_duration_s={}\nseed={}\n",
        config.model.describe(),
        config.sample_rate_hz,
        config.movement_duration_s,
        config.seed
    );
    fs::write(&meta_path, meta).map_err(|source| SimError::Write { path: meta_path, source })?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{welch_psd, MfpExtractor, WindowKind};

    const FS: f64 = 2e6;

    fn spec(label: &str) -> MovementSpec {
        MovementSpec::baseline(label.parse().unwrap())
    }

    #[test]
    fn axis_labels_are_canonical() {
        let s: AxisSet = "zx".parse().unwrap();
        assert_eq!(s.label(), "XZ");
        assert_eq!(AxisSet::all().iter().map(|a| a.label()).collect::<Vec<_>>(), vec!["X", "Y", "Z", "XY", "XZ", "YZ", "XYZ"]);
        assert!(AxisSet::new(&[]).is_err());
        assert!("".parse::<AxisSet>().is_err());
        assert!("XQ".parse::<AxisSet>().is_err());
    }

    #[test]
    fn off_grid_values_rejected() {
        assert!(MovementSpec::new("X".parse().unwrap(), 13.0, 1.0).is_err());
        assert!(MovementSpec::new("X".parse().unwrap(), 12.5, 3.0).is_err());
    }

    #[test]
    fn single_tone_psd_peak() {
        let mut model = EmissionModel::default().noiseless();
        model.x_tones = vec![Tone { center_hz: 150_000.0, amplitude: 1.0, drift_hz: 0.0 }];
        let mut s = spec("X");
        s.distance_mm = 50.0;
        let rec = synth_movement(&s, &model, FS, 0.05, 1).unwrap();
        let p = welch_psd(&rec, 4096, WindowKind::Hann).unwrap();
        let arg = (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
        assert_eq!(arg, (150_000.0 / (FS / 4096.0)).round() as usize);
    }

    #[test]
    fn deterministic_per_seed() {
        let m = EmissionModel::default();
        let a = synth_movement(&spec("XY"), &m, FS, 0.02, 42).unwrap();
        let b = synth_movement(&spec("XY"), &m, FS, 0.02, 42).unwrap();
        let c = synth_movement(&spec("XY"), &m, FS, 0.02, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_duration() {
        assert!(synth_movement(&spec("X"), &EmissionModel::default(), FS, 0.0, 1).is_err());
    }

    #[test]
    fn energy_non_decreasing_in_speed() {
        let model = EmissionModel::default();
        for axes in AxisSet::all() {
            for d in DISTANCES_MM {
                let energies: Vec<f64> = SPEEDS_MM_S
                    .iter()
                    .map(|&s| model.burst_energy(&MovementSpec::new(axes, s, d).unwrap(), FS, 0.25))
                    .collect();
                assert!(energies.windows(2).all(|w| w[1] >= w[0]), "{axes} d={d}: {energies:?}");
            }
        }
        // Measured energy tracks the expectation when only tones are present.
        let quiet = EmissionModel::default().noiseless();
        let mut prev = 0.0;
        for s in SPEEDS_MM_S {
            let sp = MovementSpec::new("XZ".parse().unwrap(), s, 5.0).unwrap();
            let rec = synth_movement(&sp, &quiet, FS, 0.25, 3).unwrap();
            let e: f64 = rec.samples().iter().map(|z| z.norm_sqr()).sum();
            let expected = quiet.burst_energy(&sp, FS, 0.25);
            assert!((e - expected).abs() < 0.02 * expected, "{e} vs {expected}");
            assert!(e >= prev);
            prev = e;
        }
    }

    #[test]
    fn axis_subsets_geometrically_distinct() {
        let model = EmissionModel::default().noiseless();
        let ex = MfpExtractor::new(4096, 2048, WindowKind::Hann).unwrap();
        let mfps: Vec<Vec<f64>> = AxisSet::all()
            .into_iter()
            .map(|a| {
                let rec = synth_movement(&MovementSpec::new(a, 12.5, 50.0).unwrap(), &model, FS, 0.05, 9).unwrap();
                ex.mfp(rec.samples(), FS).unwrap().values
            })
            .collect();
        for i in 0..mfps.len() {
            for j in i + 1..mfps.len() {
                let dot: f64 = mfps[i].iter().zip(&mfps[j]).map(|(a, b)| a * b).sum();
                let na: f64 = mfps[i].iter().map(|a| a * a).sum::<f64>().sqrt();
                let nb: f64 = mfps[j].iter().map(|a| a * a).sum::<f64>().sqrt();
                assert!(dot / (na * nb) < 0.99, "{i} vs {j}: {}", dot / (na * nb));
            }
        }
    }

    #[test]
    fn one_step_workflow_is_padded_movement() {
        let model = EmissionModel::default();
        let mut wf = WorkflowSpec::new(WorkflowKind::Push, 1);
        wf.steps.truncate(1);
        let rec = synth_workflow(&wf, &model, FS, 77).unwrap();
        let gap = (wf.gap_s * FS).round() as usize;
        let step_s = wf.step_duration_s(&wf.steps[0]);
        let mv = synth_movement(&wf.steps[0], &model, FS, step_s, derive_seed(77, 1)).unwrap();
        assert_eq!(rec.len(), 2 * gap + mv.len());
        assert_eq!(&rec.samples()[gap..gap + mv.len()], mv.samples());
        let lead = synth_idle(&model, FS, wf.gap_s, derive_seed(77, 0)).unwrap();
        assert_eq!(&rec.samples()[..gap], lead.samples());
        assert!((rec.duration_s() - wf.total_duration_s()).abs() < 1.0 / FS);
    }

    #[test]
    fn push_and_pull_differ() {
        let model = EmissionModel::default();
        let push = synth_workflow(&WorkflowSpec::new(WorkflowKind::Push, 1), &model, FS, 5).unwrap();
        let pull = synth_workflow(&WorkflowSpec::new(WorkflowKind::Pull, 1), &model, FS, 5).unwrap();
        assert_ne!(push.samples(), pull.samples());
        let names: Vec<&str> = WorkflowKind::ALL.iter().map(|k| k.label()).collect();
        assert_eq!(names, ["Push", "Pull", "Pick-and-Place", "Packing"]);
        assert_eq!("pick-and-place".parse::<WorkflowKind>().unwrap(), WorkflowKind::PickAndPlace);
    }

    #[test]
    fn zero_jitter_is_identity() {
        let rec = synth_movement(&spec("Z"), &EmissionModel::default(), FS, 0.01, 3).unwrap();
        let out = perturb(&rec, &Jitter::none(), 99);
        assert_eq!(out.samples(), rec.samples());
    }

    #[test]
    fn frequency_jitter_bounded_shift() {
        let mut model = EmissionModel::default().noiseless();
        model.x_tones = vec![Tone { center_hz: 200_000.0, amplitude: 1.0, drift_hz: 0.0 }];
        let mut s = spec("X");
        s.distance_mm = 50.0;
        let rec = synth_movement(&s, &model, FS, 0.05, 1).unwrap();
        let fft_len = 4096;
        let bin_hz = FS / fft_len as f64;
        let argmax = |r: &IqRecording| {
            let p = welch_psd(r, fft_len, WindowKind::Hann).unwrap();
            (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap() as i64
        };
        let base = argmax(&rec);
        let jitter = Jitter { amp_jitter_pct: 0.0, time_jitter_s: 0.0, freq_jitter_hz: 1500.0 };
        for seed in 0..10 {
            let moved = argmax(&perturb(&rec, &jitter, seed));
            assert!((moved - base).abs() <= (1500.0 / bin_hz).round() as i64);
        }
    }

    #[test]
    fn perturb_keeps_length() {
        let rec = synth_movement(&spec("Y"), &EmissionModel::default(), FS, 0.01, 3).unwrap();
        assert_eq!(perturb(&rec, &Jitter::default(), 1).len(), rec.len());
    }

    #[test]
    fn plan_counts() {
        let mut cfg = DatasetConfig::desk(1);
        cfg.workflows = None;
        assert_eq!(cfg.plan().len(), 210);
        assert!(DatasetConfig::paper_scale(1).plan().iter().filter(|p| matches!(p, PlannedSample::Movement { .. })).count() >= 7800);
        let wf = DatasetConfig::paper_scale(1).plan().iter().filter(|p| matches!(p, PlannedSample::Workflow { .. })).count();
        assert_eq!(wf, 396);
    }

    #[test]
    fn plan_seeds_are_distinct_and_stable() {
        let a = DatasetConfig::desk(5).plan();
        let b = DatasetConfig::desk(5).plan();
        assert_eq!(a, b);
        let mut seeds: Vec<u64> = a.iter().map(PlannedSample::seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), a.len());
    }
}
