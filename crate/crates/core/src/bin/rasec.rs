use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rasec::harness::beampattern::write_beam_pattern_csv;
use rasec::harness::validate::run_validation;
use rasec::harness::{
    export_beam_pattern, rotation_error_study, run_experiment, run_sweep, sense, solve_scheme,
    summarize, write_csv, write_jsonl, write_summary_csv, ExperimentConfig, ResultRecord,
    SchemeTag,
};

#[derive(Parser)]
#[command(name = "rasec", version, about = "Monte-Carlo runner for secure beamforming with rotatable antennas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured scheme over all trials (or the rotation-error
    /// study when error bounds are configured).
    Run(Common),
    /// Run the configured parameter sweep.
    Sweep(Common),
    /// Export beam patterns of every configured scheme for one trial.
    Beampattern {
        #[command(flatten)]
        common: Common,
        /// Trial index whose scene is used.
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Run the gradient, sensing and surrogate self-checks.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config file, or `defaults` for the reference setup.
    #[arg(long, default_value = "defaults")]
    config: PathBuf,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; results go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Number of trials (overrides the config).
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated scheme tags (overrides the config).
    #[arg(long)]
    scheme: Option<String>,
    /// Also write the fully resolved config to `manifest.toml`.
    #[arg(long)]
    manifest: bool,
    /// Add wall-clock columns (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Config(String),
    Validation,
}

impl From<rasec::Error> for Failure {
    fn from(e: rasec::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn resolve(c: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    if let Some(s) = c.seed {
        cfg.experiment.master_seed = s;
    }
    if let Some(t) = c.trials {
        cfg.experiment.n_trials = t;
    }
    if let Some(list) = &c.scheme {
        cfg.experiment.schemes = SchemeTag::parse_list(list)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn prepare_out(c: &Common, cfg: &ExperimentConfig) -> Result<(), Failure> {
    if let Some(dir) = &c.out {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
        if c.manifest {
            write_file(&dir.join("manifest.toml"), cfg.to_toml_string().as_bytes())?;
        }
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

fn emit_records(c: &Common, records: &[ResultRecord]) -> Result<(), Failure> {
    let mut body = Vec::new();
    let name = match c.format {
        Format::Csv => {
            write_csv(&mut body, records, c.timing)?;
            "records.csv"
        }
        Format::Json => {
            write_jsonl(&mut body, records, c.timing)?;
            "records.jsonl"
        }
    };
    let mut summary = Vec::new();
    write_summary_csv(&mut summary, &summarize(records), c.timing)?;
    match &c.out {
        Some(dir) => {
            write_file(&dir.join(name), &body)?;
            write_file(&dir.join("summary.csv"), &summary)?;
        }
        None => io::stdout().write_all(&body)?,
    }
    Ok(())
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run(c) => {
            let cfg = resolve(&c)?;
            prepare_out(&c, &cfg)?;
            let records = if cfg.experiment.rotation_error_bounds_deg.is_empty() {
                run_experiment(&cfg)
            } else {
                rotation_error_study(&cfg)?
            };
            emit_records(&c, &records)
        }
        Command::Sweep(c) => {
            let cfg = resolve(&c)?;
            prepare_out(&c, &cfg)?;
            let records = run_sweep(&cfg)?;
            emit_records(&c, &records)
        }
        Command::Beampattern { common: c, trial } => {
            let cfg = resolve(&c)?;
            prepare_out(&c, &cfg)?;
            let sensed = sense(&cfg, trial)?;
            let array = cfg.array_config()?;
            let mut patterns = Vec::new();
            for &scheme in &cfg.experiment.schemes {
                let run = solve_scheme(&cfg, &sensed, scheme)?;
                let rows = export_beam_pattern(
                    &array,
                    &run.outcome.solution,
                    &sensed.scene,
                    &run.region,
                    cfg.experiment.beam_pattern_resolution_deg,
                );
                patterns.push((scheme, rows));
            }
            let mut body = Vec::new();
            write_beam_pattern_csv(&mut body, &patterns)?;
            match &c.out {
                Some(dir) => write_file(&dir.join("beampattern.csv"), &body),
                None => Ok(io::stdout().write_all(&body)?),
            }
        }
        Command::Validate(c) => {
            let cfg = resolve(&c)?;
            let checks = run_validation(&cfg)?;
            let mut all = true;
            for ch in &checks {
                all &= ch.passed;
                println!(
                    "{} {:<32} {}",
                    if ch.passed { "PASS" } else { "FAIL" },
                    ch.name,
                    ch.detail
                );
            }
            if all {
                Ok(())
            } else {
                Err(Failure::Validation)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation) => {
            eprintln!("validation failed");
            ExitCode::from(2)
        }
    }
}
