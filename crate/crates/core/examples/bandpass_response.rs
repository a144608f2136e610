//! Magnitude response of the default band-pass filter and its sections.
//! Usage: `bandpass_response [order] [low_hz] [high_hz]`.

use rfprint::dsp::{design_butterworth_bandpass, BandpassSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let order: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);
    let low: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10e3);
    let high: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(500e3);
    let fs = 2e6;

    let filter = design_butterworth_bandpass(&BandpassSpec::new(low, high, order), fs)?;
    println!("{} sections, stable: {}", filter.sections.len(), filter.is_stable());
    for (i, s) in filter.sections.iter().enumerate() {
        println!("  {i}: b = [{:.6e}, {:.6e}, {:.6e}]  a = [1, {:.6}, {:.6}]", s.b0, s.b1, s.b2, s.a1, s.a2);
    }
    println!("{:>12}  {:>10}", "freq (Hz)", "|H| (dB)");
    for f in [1e3, 5e3, low, 20e3, 50e3, 100e3, 250e3, high, 700e3, 900e3] {
        println!("{f:>12.0}  {:>10.3}", filter.magnitude_db(f, fs));
    }
    Ok(())
}
