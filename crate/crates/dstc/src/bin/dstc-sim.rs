use clap::{Args, Parser, Subcommand};
use dstc::harness::{
    emit_csv, run_ber, run_bound_comparison, run_convergence, run_fd_selection, ExperimentConfig,
};

/// Monte Carlo experiment runner for the two-hop adjustable-code simulator.
#[derive(Parser)]
#[command(name = "dstc-sim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file (flat key = value format).
    #[arg(long)]
    config: String,
    /// Master seed; overrides the `seed` key in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: String,
}

#[derive(Subcommand)]
enum Command {
    /// BER sweep over the configured SNR grid.
    Ber(Common),
    /// Per-symbol-index convergence trace (adaptive schemes only).
    Converge(Common),
    /// Monte Carlo pairwise error probability against the analytical bounds.
    Bounds(Common),
    /// Distributed determinant-based code selection trials.
    Fdarmo(Common),
}

fn load(common: &Common) -> dstc::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> dstc::Result<String> {
    match cli.command {
        Command::Ber(c) => {
            let cfg = load(&c)?;
            let records = run_ber(&cfg)?;
            emit_csv(&records, &c.out)?;
            Ok(format!(
                "ber: {} ({} SNR points, {} frames each) -> {}",
                cfg.scheme.name(),
                records.len(),
                cfg.frames,
                c.out
            ))
        }
        Command::Converge(c) => {
            let cfg = load(&c)?;
            let records = run_convergence(&cfg)?;
            emit_csv(&records, &c.out)?;
            Ok(format!(
                "converge: {} ({} indices, {} frames) -> {}",
                cfg.scheme.name(),
                records.len(),
                cfg.frames,
                c.out
            ))
        }
        Command::Bounds(c) => {
            let cfg = load(&c)?;
            let records = run_bound_comparison(&cfg)?;
            emit_csv(&records, &c.out)?;
            Ok(format!(
                "bounds: {} SNR points, {} trials each -> {}",
                records.len(),
                cfg.frames * cfg.frame_len,
                c.out
            ))
        }
        Command::Fdarmo(c) => {
            let cfg = load(&c)?;
            let records = run_fd_selection(&cfg)?;
            emit_csv(&records, &c.out)?;
            Ok(format!(
                "fdarmo: {} trials, {} candidates each -> {}",
                records.len(),
                cfg.candidates,
                c.out
            ))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(msg) => println!("{msg}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
