//! Channel of the transmit array toward a user, and how the array rotation
//! and element orientations change the gain of a co-phased beam.

use rasec::geometry::{beam_gain, channel_vector, PolarPosition, RotationState};
use rasec::harness::ExperimentConfig;

fn main() -> rasec::Result<()> {
    let cfg = ExperimentConfig::default();
    let array = cfg.array_config()?;
    let user = PolarPosition::new(40.0, 25f64.to_radians())?;

    let flat = RotationState::zeros(array.n_tx);
    let h = channel_vector(&array, &flat, &user)?;
    println!("channel toward {:.0} m, {:.0}°:", user.range, user.azimuth.to_degrees());
    for (n, x) in h.entries().iter().enumerate() {
        println!("  element {n}: |h| = {:.3e}, arg = {:+.3} rad", x.norm(), x.arg());
    }

    // Matched beam for the unrotated array.
    let w: Vec<_> = h.entries().iter().map(|x| x / x.norm() / (array.n_tx as f64).sqrt()).collect();
    let tilts = [0.0f64, 5.0, 10.0, 15.0];
    println!("\nbeam gain at the user (dB):");
    for deg in tilts {
        let mut rot = RotationState::zeros(array.n_tx);
        rot.varphi.iter_mut().for_each(|v| *v = deg.to_radians());
        println!("  elements turned {deg:>4}°: {:.2}", beam_gain(&array, &rot, &w, user.azimuth, user.range));
    }
    for deg in tilts {
        let rot = RotationState { phi_arr: deg.to_radians(), varphi: vec![0.0; array.n_tx] };
        println!("  array turned {deg:>6}°: {:.2}", beam_gain(&array, &rot, &w, user.azimuth, user.range));
    }
    Ok(())
}
