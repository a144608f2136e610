//! Averaged PSD of simulated movements, to check that the emitted tones
//! fall inside the band-pass range. Usage: `band_explore [reps]`.

use rfprint::pipeline::{band_explore, PipelineConfig, SimulatedSource, BAND_EXPLORE_FFT_LEN};
use rfprint::simulate::{AxisSet, DatasetConfig, MovementGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reps: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2);
    let mut data = DatasetConfig::desk(4);
    data.workflows = None;
    data.movements = Some(MovementGrid {
        classes: AxisSet::all(),
        distances_mm: vec![1.0],
        speeds_mm_s: vec![12.5],
        reps,
    });
    let summary = band_explore(&SimulatedSource::new(data), &PipelineConfig::default(), BAND_EXPLORE_FFT_LEN)?;
    print!("{}", summary.to_text());
    Ok(())
}
