//! Whole-workflow recognition across three capture sets.
//!
//! Set 1 is clean (30 dB SNR); sets 2 and 3 are noisier (20 dB) and each
//! recording is perturbed in amplitude, time and frequency. Each set is
//! split, fitted and scored on its own.
//! Usage: `workflow_reconstruction [reps] [seed]`.

use rfprint::pipeline::{workflow_eval, PipelineConfig, SimulatedSource};
use rfprint::simulate::{DatasetConfig, WorkflowGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(33);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8);
    let mut data = DatasetConfig::desk(seed);
    data.movements = None;
    data.workflows = Some(WorkflowGrid::standard(reps));
    let report = workflow_eval(&SimulatedSource::new(data), &PipelineConfig::default())?;
    print!("{}", report.to_text());
    Ok(())
}
