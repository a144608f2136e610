use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::classify::{Kernel, SvmParams};
use crate::dsp::{BandpassSpec, WindowKind};
use crate::features::PcaTarget;

use super::PipelineError;

/// Which rows an experiment fits PCA and the scaler on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcaScope {
    /// Each report column (distance, speed or workflow set) fits its own
    /// transform on its training split.
    PerColumn,
    /// One transform fitted on the union of every column's training split.
    Global,
}

impl std::fmt::Display for PcaScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PcaScope::PerColumn => "per-column",
            PcaScope::Global => "global",
        })
    }
}

impl std::str::FromStr for PcaScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-column" => Ok(PcaScope::PerColumn),
            "global" => Ok(PcaScope::Global),
            _ => Err(format!("expected per-column or global, got {s:?}")),
        }
    }
}

/// Every knob of the feature pipeline and classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub sample_rate_hz: f64,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub filter_order: usize,
    pub fft_len: usize,
    pub window: WindowKind,
    /// `None` means `fft_len / 2`.
    pub hop: Option<usize>,
    pub pca: PcaTarget,
    pub pca_scope: PcaScope,
    pub svm: SvmParams,
    /// Pick SVM parameters by cross-validated grid search instead of `svm`.
    pub grid_search: bool,
    pub test_fraction: f64,
    pub folds: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            sample_rate_hz: 2_000_000.0,
            band_low_hz: 10_000.0,
            band_high_hz: 500_000.0,
            filter_order: 5,
            fft_len: 16_384,
            window: WindowKind::Hann,
            hop: None,
            pca: PcaTarget::Threshold {
                tau: 0.99999,
                cap: Some(14),
            },
            pca_scope: PcaScope::PerColumn,
            svm: SvmParams::default(),
            grid_search: false,
            test_fraction: 0.20,
            folds: 5,
            seed: 0,
        }
    }
}

const KEYS: &[&str] = &[
    "sample_rate_hz",
    "band_low_hz",
    "band_high_hz",
    "filter_order",
    "fft_len",
    "window",
    "hop",
    "pca_tau",
    "pca_cap",
    "pca_components",
    "pca_scope",
    "svm_c",
    "svm_kernel",
    "svm_gamma",
    "svm_tol",
    "svm_max_iter",
    "grid_search",
    "test_fraction",
    "folds",
    "seed",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, PipelineError>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| PipelineError::Config(format!("{key}={value}: {e}")))
}

impl PipelineConfig {
    pub fn hop(&self) -> usize {
        self.hop.unwrap_or(self.fft_len / 2)
    }

    pub fn band(&self) -> BandpassSpec {
        BandpassSpec::new(self.band_low_hz, self.band_high_hz, self.filter_order)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let err = |m: String| Err(PipelineError::Config(m));
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return err(format!("sample rate must be positive, got {}", self.sample_rate_hz));
        }
        if !(0.0 < self.band_low_hz && self.band_low_hz < self.band_high_hz && self.band_high_hz < self.sample_rate_hz / 2.0) {
            return err(format!(
                "band {}-{} Hz must satisfy 0 < low < high < Nyquist ({} Hz)",
                self.band_low_hz,
                self.band_high_hz,
                self.sample_rate_hz / 2.0
            ));
        }
        if self.filter_order == 0 {
            return err("filter order must be at least 1".into());
        }
        if self.fft_len < 2 {
            return err(format!("fft_len must be at least 2, got {}", self.fft_len));
        }
        if self.hop() == 0 || self.hop() > self.fft_len {
            return err(format!("hop {} must lie in 1..={}", self.hop(), self.fft_len));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return err(format!("test_fraction {} outside (0, 1)", self.test_fraction));
        }
        if self.grid_search && self.folds < 2 {
            return err(format!("grid search needs at least 2 folds, got {}", self.folds));
        }
        match self.pca {
            PcaTarget::Components(0) => return err("pca_components must be at least 1".into()),
            PcaTarget::Threshold { tau, .. } if !(tau > 0.0 && tau <= 1.0) => {
                return err(format!("pca_tau {tau} outside (0, 1]"));
            }
            _ => {}
        }
        self.svm.validate().map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        let v = value.trim();
        match key.trim() {
            "sample_rate_hz" => self.sample_rate_hz = parse(key, v)?,
            "band_low_hz" => self.band_low_hz = parse(key, v)?,
            "band_high_hz" => self.band_high_hz = parse(key, v)?,
            "filter_order" => self.filter_order = parse(key, v)?,
            "fft_len" => self.fft_len = parse(key, v)?,
            "window" => self.window = v.parse().map_err(|e| PipelineError::Config(format!("window={v}: {e}")))?,
            "hop" => self.hop = if v == "auto" { None } else { Some(parse(key, v)?) },
            "pca_tau" => {
                let cap = match self.pca {
                    PcaTarget::Threshold { cap, .. } => cap,
                    PcaTarget::Components(_) => None,
                };
                self.pca = PcaTarget::Threshold { tau: parse(key, v)?, cap };
            }
            "pca_cap" => {
                let cap = if v == "none" { None } else { Some(parse(key, v)?) };
                match &mut self.pca {
                    PcaTarget::Threshold { cap: c, .. } => *c = cap,
                    PcaTarget::Components(_) => {
                        return Err(PipelineError::Config("pca_cap conflicts with pca_components".into()));
                    }
                }
            }
            "pca_components" => self.pca = PcaTarget::Components(parse(key, v)?),
            "pca_scope" => self.pca_scope = parse(key, v)?,
            "svm_c" => self.svm.c = parse(key, v)?,
            "svm_kernel" => self.svm.kernel = v.parse::<Kernel>().map_err(|e| PipelineError::Config(e.to_string()))?,
            "svm_gamma" => self.svm.gamma = parse(key, v)?,
            "svm_tol" => self.svm.tol = parse(key, v)?,
            "svm_max_iter" => self.svm.max_iter = parse(key, v)?,
            "grid_search" => self.grid_search = parse(key, v)?,
            "test_fraction" => self.test_fraction = parse(key, v)?,
            "folds" => self.folds = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            other => {
                return Err(PipelineError::Config(format!("unknown key {other:?}; known keys: {}", KEYS.join(", "))));
            }
        }
        Ok(())
    }

    /// Parses `key=value` lines. Blank lines and `#` comments are skipped;
    /// unspecified keys keep their defaults.
    pub fn from_kv_str(text: &str) -> Result<Self, PipelineError> {
        let mut cfg = PipelineConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(format!("line {}: expected key=value, got {line:?}", n + 1)))?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        Self::from_kv_str(&text)
    }

    /// Ordered settings; `from_kv_str(to_kv_string())` restores `self`.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("sample_rate_hz", self.sample_rate_hz.to_string()),
            ("band_low_hz", self.band_low_hz.to_string()),
            ("band_high_hz", self.band_high_hz.to_string()),
            ("filter_order", self.filter_order.to_string()),
            ("fft_len", self.fft_len.to_string()),
            ("window", self.window.to_string()),
            ("hop", self.hop.map_or("auto".to_string(), |h| h.to_string())),
        ];
        match self.pca {
            PcaTarget::Components(k) => out.push(("pca_components", k.to_string())),
            PcaTarget::Threshold { tau, cap } => {
                out.push(("pca_tau", tau.to_string()));
                out.push(("pca_cap", cap.map_or("none".to_string(), |c| c.to_string())));
            }
        }
        out.extend([
            ("pca_scope", self.pca_scope.to_string()),
            ("svm_c", self.svm.c.to_string()),
            ("svm_kernel", self.svm.kernel.to_string()),
            ("svm_gamma", self.svm.gamma.to_string()),
            ("svm_tol", self.svm.tol.to_string()),
            ("svm_max_iter", self.svm.max_iter.to_string()),
            ("grid_search", self.grid_search.to_string()),
            ("test_fraction", self.test_fraction.to_string()),
            ("folds", self.folds.to_string()),
            ("seed", self.seed.to_string()),
        ]);
        out
    }

    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub(crate) fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self, PipelineError> {
        let mut cfg = PipelineConfig::default();
        // pca_components and pca_tau are mutually exclusive; apply tau first.
        for key in KEYS {
            if let Some(v) = pairs.get(*key) {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
