//! Seeded Monte Carlo sum-rate experiments for RedRIS-aided downlinks: scenario configs
//! and presets, the trial runner, and result files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiment;
pub mod output;
pub mod presets;

pub use config::{ConfigError, ScenarioConfig, Scheme};
pub use experiment::{run_experiment, run_experiment_with, trial_rng, RunOptions, TrialRecord};
pub use output::{aggregate, emit_results, write_aggregate, write_records, AggregateRow, Format};
pub use presets::{preset, PRESETS};
