//! Write a recording as 16-bit WAV and as raw cf32, read both back and cut
//! fixed-cadence windows from it. Usage: `iq_roundtrip [out_dir]`.

use std::path::PathBuf;

use rfprint::iq::{load_iq, segment_fixed_cadence, write_raw_cf32, write_wav_iq, IqRecording, Origin};
use rfprint::simulate::{synth_movement, EmissionModel, MovementSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let spec = MovementSpec::baseline("XY".parse()?);
    let raw_rec = synth_movement(&spec, &EmissionModel::default(), 2e6, 0.1, 42)?;
    // 16-bit PCM covers [-1, 1); scale the summed tones to fit.
    let peak = raw_rec.samples().iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
    let scaled = raw_rec.samples().iter().map(|z| z * (0.99 / peak)).collect();
    let rec = IqRecording::new(scaled, raw_rec.sample_rate_hz(), Origin::Derived("scaled".into()))?;

    let wav = dir.join("xy.wav");
    let raw = dir.join("xy.cf32");
    write_wav_iq(&wav, &rec)?;
    write_raw_cf32(&raw, &rec)?;

    for path in [&wav, &raw] {
        let back = load_iq(path, rec.sample_rate_hz())?;
        let err = rec
            .samples()
            .iter()
            .zip(back.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        println!("{}: {} samples at {} Hz, max error {err:.2e}", path.display(), back.len(), back.sample_rate_hz());
    }

    let segments = segment_fixed_cadence(&rec, 0.02, 0.015)?;
    println!("{} windows of 15 ms every 20 ms", segments.len());
    for s in segments.iter().take(3) {
        println!("  start {:.3} s, {} samples", s.start_s, s.samples.len());
    }
    Ok(())
}
