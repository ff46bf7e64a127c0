//! Experiment orchestration: configuration parsing, seeded Monte Carlo
//! BER sweeps, convergence traces, bound comparisons, distributed code
//! selection runs, and CSV persistence.

mod config;
mod csv;
mod run;
mod seed;

pub use config::{ExperimentConfig, FeedbackSchedule, Scheme};
pub use csv::{emit_csv, CsvRecord};
pub use run::{
    calibrate_noise_var, run_ber, run_bound_comparison, run_convergence, run_fd_selection,
    BerRecord, BoundRecord, ConvergenceRecord, FdSelectionRecord,
};
pub use seed::derive_seed;
