//! Distance and speed sweeps over simulated movements.
//!
//! The distance sweep holds speed at 12.5 mm/s; the speed sweep holds
//! distance at 1 mm. Usage: `granularity_sweeps [reps]`.

use rfprint::pipeline::{movement_report, ExperimentKind, PipelineConfig, SimulatedSource};
use rfprint::simulate::{AxisSet, DatasetConfig, MovementGrid, DISTANCES_MM, SPEEDS_MM_S};

fn source(distances: Vec<f64>, speeds: Vec<f64>, reps: usize) -> SimulatedSource {
    let mut data = DatasetConfig::desk(5);
    data.workflows = None;
    data.movements = Some(MovementGrid {
        classes: AxisSet::all(),
        distances_mm: distances,
        speeds_mm_s: speeds,
        reps,
    });
    SimulatedSource::new(data)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reps: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(30);
    let cfg = PipelineConfig::default();

    let by_distance = movement_report(&source(DISTANCES_MM.to_vec(), vec![12.5], reps), &cfg, ExperimentKind::DistanceSweep)?;
    print!("{}", by_distance.to_text());
    println!();
    let by_speed = movement_report(&source(vec![1.0], SPEEDS_MM_S.to_vec(), reps), &cfg, ExperimentKind::SpeedSweep)?;
    print!("{}", by_speed.to_text());
    Ok(())
}
