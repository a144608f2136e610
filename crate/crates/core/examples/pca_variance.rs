//! Explained variance of MFP features for the seven movement classes, and
//! how many components each threshold keeps.
//! Usage: `pca_variance [reps]`.

use rfprint::features::{cumulative_explained_variance, pca_fit, PcaTarget};
use rfprint::pipeline::{extract_samples, FeatureExtractor, PipelineConfig, SimulatedSource};
use rfprint::simulate::{AxisSet, DatasetConfig, MovementGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reps: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(10);
    let mut data = DatasetConfig::desk(11);
    data.workflows = None;
    data.movements = Some(MovementGrid {
        classes: AxisSet::all(),
        distances_mm: vec![1.0],
        speeds_mm_s: vec![12.5],
        reps,
    });
    let cfg = PipelineConfig::default();
    let samples = extract_samples(&SimulatedSource::new(data), &FeatureExtractor::new(&cfg)?)?;
    let mfps: Vec<Vec<f64>> = samples.into_iter().map(|s| s.mfp).collect();
    println!("{} MFPs of {} bins", mfps.len(), mfps[0].len());

    let full = pca_fit(&mfps, PcaTarget::Threshold { tau: 1.0, cap: None })?;
    for (i, c) in cumulative_explained_variance(&full).iter().enumerate().take(20) {
        println!("  k = {:>2}: cumulative {c:.6}", i + 1);
    }
    for tau in [0.9, 0.99, 0.999, 0.99999] {
        let m = pca_fit(&mfps, PcaTarget::Threshold { tau, cap: None })?;
        println!("tau {tau}: {} components", m.n_components());
    }
    Ok(())
}
