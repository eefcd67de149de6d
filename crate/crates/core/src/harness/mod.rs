//! Seeded Monte-Carlo experiments: scene generation, the per-trial pipeline,
//! parameter sweeps, the rotation-error study, beam-pattern export and
//! result serialization.

pub mod beampattern;
pub mod config;
pub mod output;
pub mod scheme;
pub mod seeds;
pub mod trial;
pub mod validate;

pub use beampattern::{export_beam_pattern, max_gain_over, BeamPatternRow};
pub use config::{ExperimentConfig, SweepSpec};
pub use output::{summarize, write_csv, write_jsonl, write_summary_csv, ResultRecord, SummaryRow};
pub use scheme::SchemeTag;
pub use seeds::trial_seed;
pub use trial::{
    generate_scene, rotation_error_study, run_experiment, run_sweep, run_trial, sense,
    solve_scheme, SchemeRun, SensedScene,
};
