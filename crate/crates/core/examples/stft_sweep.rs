//! Window and FFT-length sweep: accuracy and mean STFT time per setting.
//! Usage: `stft_sweep [reps] [timing_runs]`.

use rfprint::pipeline::{stft_sweep, PipelineConfig, SimulatedSource, StftSweepOptions};
use rfprint::simulate::{AxisSet, DatasetConfig, MovementGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let runs: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);

    let mut data = DatasetConfig::desk(3);
    data.workflows = None;
    data.movements = Some(MovementGrid {
        classes: AxisSet::all(),
        distances_mm: vec![1.0],
        speeds_mm_s: vec![12.5],
        reps,
    });
    let opts = StftSweepOptions {
        timing_runs: runs,
        ..Default::default()
    };
    let report = stft_sweep(&SimulatedSource::new(data), &PipelineConfig::default(), &opts)?;
    print!("{}", report.to_text());
    Ok(())
}
