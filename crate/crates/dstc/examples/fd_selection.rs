//! Distributed determinant-based code selection: each trial draws a pool
//! of random sphere matrices and picks the determinant maximizer without
//! any feedback link.

use dstc::harness::{emit_csv, run_fd_selection, ExperimentConfig, Scheme};

fn main() -> dstc::Result<()> {
    let cfg = ExperimentConfig {
        scheme: Scheme::FdArmo,
        snr_grid_db: vec![10.0],
        frames: 20, // trials
        candidates: 500,
        master_seed: 7,
        ..ExperimentConfig::default()
    };
    let records = run_fd_selection(&cfg)?;
    println!("{:>6} {:>16} {:>14}", "trial", "selected_index", "det_modulus");
    for r in &records {
        println!("{:>6} {:>16} {:>14.6}", r.trial, r.selected_index, r.det_modulus);
    }
    emit_csv(&records, "fd_selection.csv")?;
    println!("wrote fd_selection.csv");
    Ok(())
}
