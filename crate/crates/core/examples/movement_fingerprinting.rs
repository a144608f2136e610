//! Baseline movement classification on a simulated dataset.
//!
//! Seven axis-combination classes at 12.5 mm/s and 1 mm, rendered in memory,
//! classified with the default pipeline (Hann, 16384-point STFT, 14 PCA
//! components, linear SVM). Usage: `movement_fingerprinting [reps] [seed]`.

use std::time::Instant;

use rfprint::pipeline::{movement_report, ExperimentKind, PipelineConfig, SimulatedSource};
use rfprint::simulate::{AxisSet, DatasetConfig, MovementGrid, BASELINE_DISTANCE_MM, BASELINE_SPEED_MM_S};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let mut data = DatasetConfig::desk(seed);
    data.workflows = None;
    data.movements = Some(MovementGrid {
        classes: AxisSet::all(),
        distances_mm: vec![BASELINE_DISTANCE_MM],
        speeds_mm_s: vec![BASELINE_SPEED_MM_S],
        reps,
    });
    let source = SimulatedSource::new(data);
    let cfg = PipelineConfig {
        seed,
        ..Default::default()
    };

    let start = Instant::now();
    let report = movement_report(&source, &cfg, ExperimentKind::Baseline)?;
    print!("{}", report.to_text());
    println!("{} recordings in {:.1} s", reps * 7, start.elapsed().as_secs_f64());
    Ok(())
}
