//! BER sweep for one scheme over an SNR grid, printed as a table and
//! written to a CSV artifact. Equivalent to `dstc-sim ber` with an
//! in-code configuration.

use dstc::harness::{emit_csv, run_ber, ExperimentConfig, Scheme};

fn main() -> dstc::Result<()> {
    let cfg = ExperimentConfig {
        scheme: Scheme::DAlamouti,
        snr_grid_db: vec![0.0, 4.0, 8.0, 12.0, 16.0],
        frames: 200,
        frame_len: 200,
        master_seed: 7,
        ..ExperimentConfig::default()
    };
    let records = run_ber(&cfg)?;
    println!("scheme: {}", cfg.scheme.name());
    println!("{:>8} {:>12} {:>12} {:>12}", "snr_db", "bit_errors", "bits", "ber");
    for r in &records {
        println!(
            "{:>8.1} {:>12} {:>12} {:>12.4e}",
            r.snr_db, r.bit_errors, r.bits_total, r.ber
        );
    }
    emit_csv(&records, "ber_sweep.csv")?;
    println!("wrote ber_sweep.csv");
    Ok(())
}
