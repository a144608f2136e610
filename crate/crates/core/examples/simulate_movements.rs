//! Render one recording per movement class and show where its energy
//! sits in frequency. Usage: `simulate_movements [out_dir]`.

use rfprint::dsp::{MfpExtractor, WindowKind};
use rfprint::iq::write_raw_cf32;
use rfprint::simulate::{synth_movement, AxisSet, EmissionModel, MovementSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1);
    let model = EmissionModel::default();
    print!("{}", model.describe());
    let fs = 2e6;
    let ex = MfpExtractor::new(8192, 4096, WindowKind::Hann)?;

    for axes in AxisSet::all() {
        for (speed, dist) in [(12.5, 1.0), (100.0, 50.0)] {
            let spec = MovementSpec::new(axes, speed, dist)?;
            let rec = synth_movement(&spec, &model, fs, 0.25, 1)?;
            let mfp = ex.mfp(rec.samples(), fs)?;
            // Strongest three bins, reported as signed frequencies.
            let mut bins: Vec<usize> = (0..mfp.values.len()).collect();
            bins.sort_by(|&a, &b| mfp.values[b].total_cmp(&mfp.values[a]));
            let peaks: Vec<String> = bins
                .iter()
                .take(3)
                .map(|&b| {
                    let f = if b < mfp.values.len() / 2 { b as f64 } else { b as f64 - mfp.values.len() as f64 };
                    format!("{:.0} kHz", f * mfp.bin_hz / 1e3)
                })
                .collect();
            let energy: f64 = rec.samples().iter().map(|z| z.norm_sqr()).sum();
            println!("{:<22} energy {energy:>10.1}  peaks {}", spec.label(), peaks.join(", "));
            if let Some(dir) = &out {
                write_raw_cf32(std::path::Path::new(dir).join(format!("{}.cf32", spec.label())), &rec)?;
            }
        }
    }
    Ok(())
}
