//! Pilot measurements and channel estimators.

mod baselines;
mod measurement;
mod somp;

pub use baselines::{ls_estimate, nmse, nmse_db, oracle_estimate, OracleEstimate};
pub use measurement::{generate_combining, synthesize_measurements, CombiningMatrix, MeasurementSet};
pub use somp::{s_somp, s_somp_with_dictionary, Dictionary, EstimationResult};
