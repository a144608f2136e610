use crate::classify::{grid_search_cv, svm_train, default_grid, SvmModel, SvmParams};
use crate::dsp::{design_butterworth_bandpass, MfpExtractor, SosFilter};
use crate::features::{pca_fit, pca_transform, scaler_fit, scaler_transform, PcaModel, Scaler};
use crate::iq::IqRecording;

use super::{PipelineConfig, PipelineError};

/// Band-pass filter plus STFT/MFP front end, built once per config.
#[derive(Clone)]
pub struct FeatureExtractor {
    filter: SosFilter,
    mfp: MfpExtractor,
    sample_rate_hz: f64,
}

impl FeatureExtractor {
    pub fn new(cfg: &PipelineConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let filter = design_butterworth_bandpass(&cfg.band(), cfg.sample_rate_hz).map_err(|e| PipelineError::dsp("filter design", e))?;
        let mfp = MfpExtractor::new(cfg.fft_len, cfg.hop(), cfg.window).map_err(|e| PipelineError::dsp("stft setup", e))?;
        Ok(FeatureExtractor {
            filter,
            mfp,
            sample_rate_hz: cfg.sample_rate_hz,
        })
    }

    pub fn filter(&self) -> &SosFilter {
        &self.filter
    }

    pub fn mfp_extractor(&self) -> &MfpExtractor {
        &self.mfp
    }

    pub fn check_rate(&self, rec: &IqRecording) -> Result<(), PipelineError> {
        if rec.sample_rate_hz() != self.sample_rate_hz {
            return Err(PipelineError::Data(format!(
                "{}: sample rate {} Hz differs from configured {} Hz",
                rec.origin(),
                rec.sample_rate_hz(),
                self.sample_rate_hz
            )));
        }
        Ok(())
    }

    /// Band-passed copy of the samples.
    pub fn filtered(&self, rec: &IqRecording) -> Result<Vec<num_complex::Complex64>, PipelineError> {
        self.check_rate(rec)?;
        Ok(self.filter.filter(rec.samples()))
    }

    /// MFP of already filtered samples.
    pub fn mfp_of_filtered(&self, filtered: &[num_complex::Complex64]) -> Result<Vec<f64>, PipelineError> {
        self.mfp
            .mfp(filtered, self.sample_rate_hz)
            .map(|m| m.values)
            .map_err(|e| PipelineError::dsp("stft", e))
    }

    /// Raw feature vector: filter, STFT, mean over frames.
    pub fn mfp(&self, rec: &IqRecording) -> Result<Vec<f64>, PipelineError> {
        let filtered = self.filtered(rec)?;
        self.mfp_of_filtered(&filtered).map_err(|e| e.with_context(&rec.origin().to_string()))
    }
}

/// PCA followed by standard scaling, both fitted on training MFPs.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedTransform {
    pub pca: PcaModel,
    pub scaler: Scaler,
}

impl FittedTransform {
    pub fn fit(cfg: &PipelineConfig, mfps: &[Vec<f64>]) -> Result<Self, PipelineError> {
        let pca = pca_fit(mfps, cfg.pca).map_err(PipelineError::Features)?;
        let projected = pca_transform(&pca, mfps).map_err(PipelineError::Features)?;
        let scaler = scaler_fit(&projected).map_err(PipelineError::Features)?;
        Ok(FittedTransform { pca, scaler })
    }

    pub fn apply(&self, mfp: &[f64]) -> Result<Vec<f64>, PipelineError> {
        let p = self.pca.transform_row(mfp).map_err(PipelineError::Features)?;
        self.scaler.transform_row(&p).map_err(PipelineError::Features)
    }

    pub fn apply_all(&self, mfps: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, PipelineError> {
        let p = pca_transform(&self.pca, mfps).map_err(PipelineError::Features)?;
        scaler_transform(&self.scaler, &p).map_err(PipelineError::Features)
    }
}

/// `filter → stft → mfp`, then PCA and scaling when `fitted` is given.
pub fn extract_features(rec: &IqRecording, cfg: &PipelineConfig, fitted: Option<&FittedTransform>) -> Result<Vec<f64>, PipelineError> {
    let mfp = FeatureExtractor::new(cfg)?.mfp(rec)?;
    match fitted {
        Some(t) => t.apply(&mfp),
        None => Ok(mfp),
    }
}

/// Fitted transform and SVM.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub transform: FittedTransform,
    pub svm: SvmModel,
}

impl Classifier {
    /// Fits PCA, scaler and SVM on raw training MFPs. With
    /// `cfg.grid_search`, SVM parameters come from cross-validation over
    /// the default grid.
    pub fn fit<S: AsRef<str>>(cfg: &PipelineConfig, mfps: &[Vec<f64>], labels: &[S]) -> Result<Self, PipelineError> {
        Self::fit_with_transform(cfg, FittedTransform::fit(cfg, mfps)?, mfps, labels)
    }

    /// Fits only the SVM, on top of an already fitted transform.
    pub fn fit_with_transform<S: AsRef<str>>(
        cfg: &PipelineConfig,
        transform: FittedTransform,
        mfps: &[Vec<f64>],
        labels: &[S],
    ) -> Result<Self, PipelineError> {
        let x = transform.apply_all(mfps)?;
        let params: SvmParams = if cfg.grid_search {
            grid_search_cv(&x, labels, &default_grid(), cfg.folds, cfg.seed)
                .map_err(|e| PipelineError::classify("grid search", e))?
                .best
        } else {
            cfg.svm
        };
        let svm = svm_train(&x, labels, &params).map_err(|e| PipelineError::classify("svm training", e))?;
        Ok(Classifier { transform, svm })
    }

    pub fn predict_mfp(&self, mfp: &[f64]) -> Result<&str, PipelineError> {
        let x = self.transform.apply(mfp)?;
        self.svm.predict_one(&x).map_err(|e| PipelineError::classify("prediction", e))
    }

    pub fn predict_all(&self, mfps: &[Vec<f64>]) -> Result<Vec<String>, PipelineError> {
        mfps.iter().map(|m| self.predict_mfp(m).map(str::to_string)).collect()
    }
}
