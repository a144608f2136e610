//! End-to-end orchestration: feature extraction, training, evaluation,
//! parameter sweeps and persisted models.
//!
//! Errors carry the stage that failed as their message prefix
//! (`ingest:`, `dsp:`, `features:`, `classify:` ...).

use std::path::PathBuf;

use thiserror::Error;

use crate::classify::ClassifyError;
use crate::dsp::DspError;
use crate::features::FeatureError;
use crate::iq::IqError;
use crate::manifest::ManifestError;
use crate::simulate::SimError;

mod config;
mod experiments;
mod extract;
mod model_file;
mod report;
mod source;

pub use config::{PcaScope, PipelineConfig};
pub use experiments::{
    band_explore, eval, holdout, holdout_with, movement_report, predict, predict_recording, stft_sweep, train, workflow_eval, PsdSummary,
    StftSweepOptions, BAND_EXPLORE_FFT_LEN,
};
pub use extract::{extract_features, Classifier, FeatureExtractor, FittedTransform};
pub use model_file::{ModelFile, FORMAT_NAME, FORMAT_VERSION};
pub use report::{ExperimentKind, Report, Table};
pub use source::{extract_samples, ManifestSource, RecordingSource, Sample, SimulatedSource};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("ingest: {path}: {source}")]
    Ingest {
        path: PathBuf,
        #[source]
        source: IqError,
    },
    #[error("dsp: {context}: {source}")]
    Dsp {
        context: String,
        #[source]
        source: DspError,
    },
    #[error("features: {0}")]
    Features(#[source] FeatureError),
    #[error("classify: {context}: {source}")]
    Classify {
        context: String,
        #[source]
        source: ClassifyError,
    },
    #[error("manifest: {0}")]
    Manifest(#[from] ManifestError),
    #[error("simulate: {0}")]
    Simulate(#[source] SimError),
    #[error("model file: {0}")]
    ModelFile(String),
    #[error("data: {0}")]
    Data(String),
    #[error("{source} ({context})")]
    Context {
        context: String,
        #[source]
        source: Box<PipelineError>,
    },
}

impl PipelineError {
    pub(crate) fn dsp(context: &str, source: DspError) -> Self {
        PipelineError::Dsp {
            context: context.to_string(),
            source,
        }
    }

    pub(crate) fn classify(context: &str, source: ClassifyError) -> Self {
        PipelineError::Classify {
            context: context.to_string(),
            source,
        }
    }

    /// Appends where the error happened, keeping the stage prefix first.
    pub fn with_context(self, context: &str) -> Self {
        PipelineError::Context {
            context: context.to_string(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping context wrappers.
    pub fn root(&self) -> &PipelineError {
        match self {
            PipelineError::Context { source, .. } => source.root(),
            other => other,
        }
    }
}
