//! Parameter sweep from a config file (default: the transmit-power sweep),
//! with the trial count cut down for a quick look.
//!
//!     cargo run --release --example sweep -- configs/sensing_power_sweep.toml 20

use std::path::PathBuf;

use rasec::harness::{run_sweep, summarize, write_summary_csv, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/tx_power_sweep.toml"));
    let trials: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);

    let mut cfg = ExperimentConfig::load(&path)?;
    cfg.experiment.n_trials = trials;
    let records = run_sweep(&cfg)?;
    write_summary_csv(&mut std::io::stdout().lock(), &summarize(&records), false)?;
    Ok(())
}
