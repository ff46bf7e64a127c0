//! All six transmission schemes at a common received SNR: spatial
//! multiplexing, the fixed and randomized Alamouti relays, the two adaptive
//! optimizers, and the distributed selection rule.

use dstc::harness::{run_ber, ExperimentConfig, Scheme};

fn main() -> dstc::Result<()> {
    let schemes = [
        Scheme::Sm,
        Scheme::DAlamouti,
        Scheme::RAlamouti,
        Scheme::CArmoSg,
        Scheme::CArmoRls,
        Scheme::FdArmo,
    ];
    println!("{:>12} {:>12}", "scheme", "ber @ 10 dB");
    for scheme in schemes {
        let cfg = ExperimentConfig {
            scheme,
            snr_grid_db: vec![10.0],
            frames: 100,
            frame_len: 200,
            pilot_len: if scheme == Scheme::CArmoSg { 3 } else { 50 },
            master_seed: 7,
            ..ExperimentConfig::default()
        };
        let rec = &run_ber(&cfg)?[0];
        println!("{:>12} {:>12.4e}", scheme.name(), rec.ber);
    }
    Ok(())
}
