//! Seeded Monte Carlo experiments comparing the estimators.
//!
//! Every random quantity of a trial is derived from
//! `(master_seed, sweep_value, trial_index)` (plus the pilot length for
//! the combiner), so results do not depend on worker count, trial order
//! or which other methods are enabled.

mod config;
mod csv;
mod seed;
mod spec;
mod sweep;

pub use config::{apply_config_text, ExperimentConfig, Profile};
pub use csv::{emit_csv, parse_csv, to_csv_string, CSV_HEADER};
pub use seed::derive_seed;
pub use spec::{Averaging, Method, PathModel, RunSpec, Sweep};
pub use sweep::{
    run_trial, sweep, sweep_pilot, sweep_snr, Codebooks, Experiment, MethodOutcome, SweepPoint,
    SweepResult, SweepRow, TrialRecord,
};
