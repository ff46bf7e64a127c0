//! Feedback path round trip: quantize a power-constrained code bank to
//! 4 bits per component, pass it through a binary symmetric channel, and
//! reconstruct at the relay. Prints the distortion and the conserved power.

use dstc::armo::normalize_codes;
use dstc::feedback::{transmit_bank, FeedbackModel};
use dstc::numerics::CMatrix;
use dstc::system::{complex_gaussian, AdjustableCodeBank, SystemConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dstc::Result<()> {
    let cfg = SystemConfig::alamouti(0.1, false);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bank = AdjustableCodeBank::identity(&cfg);
    for j in 0..cfg.n_antennas {
        bank.mats[0][j] = CMatrix::from_fn(4, 4, |_, _| complex_gaussian(&mut rng));
    }
    normalize_codes(&mut bank, cfg.relay_power)?;

    println!("{:>10} {:>14} {:>14}", "bsc_p", "max_abs_error", "relay_power");
    for p in [0.0, 1e-3, 1e-2, 1e-1] {
        let fb = FeedbackModel::new(p, cfg.relay_power);
        let recv = transmit_bank(&bank, &fb, cfg.relay_power, &mut rng)?;
        let dist = (0..cfg.n_antennas)
            .map(|j| bank.mats[0][j].max_abs_diff(&recv.mats[0][j]))
            .fold(0.0f64, f64::max);
        println!("{p:>10.0e} {dist:>14.6} {:>14.12}", recv.relay_power(0));
    }
    Ok(())
}
