//! A small Monte-Carlo comparison of all schemes, printed as a summary table
//! and written as raw CSV to `target/run_experiment.csv`.

use std::fs::File;
use std::io::BufWriter;

use rasec::harness::{run_experiment, summarize, write_csv, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ExperimentConfig::default();
    cfg.experiment.n_trials = 20;
    let records = run_experiment(&cfg);

    println!("{:<12} {:>6} {:>10} {:>10}", "scheme", "n", "mean", "stderr");
    for row in summarize(&records) {
        println!("{:<12} {:>6} {:>10.4} {:>10.4}", row.scheme.as_str(), row.n, row.mean_secrecy, row.stderr_secrecy);
    }
    std::fs::create_dir_all("target")?;
    write_csv(&mut BufWriter::new(File::create("target/run_experiment.csv")?), &records, false)?;
    println!("\n{} records written to target/run_experiment.csv", records.len());
    Ok(())
}
