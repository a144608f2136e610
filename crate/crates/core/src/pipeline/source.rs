use crate::iq::{load_iq, IqRecording};
use crate::manifest::{Manifest, ManifestRow};
use crate::simulate::{DatasetConfig, PlannedSample};

use super::{FeatureExtractor, PipelineError};

/// Labelled recordings addressable by index. Implemented for on-disk
/// manifests and for simulated datasets rendered on demand.
pub trait RecordingSource {
    fn rows(&self) -> &[ManifestRow];
    fn load(&self, index: usize) -> Result<IqRecording, PipelineError>;

    fn len(&self) -> usize {
        self.rows().len()
    }

    fn is_empty(&self) -> bool {
        self.rows().is_empty()
    }
}

pub struct ManifestSource {
    pub manifest: Manifest,
    pub sample_rate_hz: f64,
}

impl ManifestSource {
    pub fn new(manifest: Manifest, sample_rate_hz: f64) -> Self {
        ManifestSource { manifest, sample_rate_hz }
    }
}

impl RecordingSource for ManifestSource {
    fn rows(&self) -> &[ManifestRow] {
        &self.manifest.rows
    }

    fn load(&self, index: usize) -> Result<IqRecording, PipelineError> {
        let path = self.manifest.resolve(&self.manifest.rows[index]);
        load_iq(&path, self.sample_rate_hz).map_err(|source| PipelineError::Ingest { path, source })
    }
}

/// Simulated dataset that is never written to disk.
pub struct SimulatedSource {
    pub config: DatasetConfig,
    plan: Vec<PlannedSample>,
    rows: Vec<ManifestRow>,
}

impl SimulatedSource {
    pub fn new(config: DatasetConfig) -> Self {
        let plan = config.plan();
        Self::from_plan(config, plan)
    }

    pub fn from_plan(config: DatasetConfig, plan: Vec<PlannedSample>) -> Self {
        let rows = plan.iter().map(PlannedSample::manifest_row).collect();
        SimulatedSource { config, plan, rows }
    }

    pub fn plan(&self) -> &[PlannedSample] {
        &self.plan
    }
}

impl RecordingSource for SimulatedSource {
    fn rows(&self) -> &[ManifestRow] {
        &self.rows
    }

    fn load(&self, index: usize) -> Result<IqRecording, PipelineError> {
        self.config.render(&self.plan[index]).map_err(PipelineError::Simulate)
    }
}

/// One row's raw feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub row: ManifestRow,
    pub mfp: Vec<f64>,
}

/// Raw MFPs for every row, in row order.
pub fn extract_samples(source: &dyn RecordingSource, extractor: &FeatureExtractor) -> Result<Vec<Sample>, PipelineError> {
    (0..source.len())
        .map(|i| {
            let rec = source.load(i)?;
            let mfp = extractor.mfp(&rec)?;
            Ok(Sample {
                row: source.rows()[i].clone(),
                mfp,
            })
        })
        .collect()
}
