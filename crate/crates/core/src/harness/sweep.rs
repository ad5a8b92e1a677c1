use std::f64::consts::TAU;
use std::time::Instant;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::seed::{derive_seed, TAG_COMBINING, TAG_NOISE, TAG_PATHS};
use super::spec::{Averaging, Method, PathModel, RunSpec, Sweep};
use crate::channel::{complex_normal, generate_channel, sample_one, PathParams, SystemConfig};
use crate::codebook::{
    build_angular_codebook, build_polar_codebook, build_spherical_codebook, RingDistance,
    SphericalCodebook,
};
use crate::estimator::{
    generate_combining, ls_estimate, nmse, oracle_estimate, s_somp_with_dictionary,
    synthesize_measurements, CombiningMatrix, Dictionary,
};
use crate::{Error, Result};

/// The dictionaries an experiment needs, built once.
#[derive(Debug, Clone, Default)]
pub struct Codebooks {
    pub spherical: Option<SphericalCodebook>,
    pub polar: Option<SphericalCodebook>,
    pub angular: Option<SphericalCodebook>,
}

impl Codebooks {
    pub fn for_spec(spec: &RunSpec) -> Result<Self> {
        let wants = |m| spec.methods.contains(&m);
        let spherical = if wants(Method::SSomp) || spec.path_model == PathModel::PlantedOnGrid {
            Some(build_spherical_codebook(&spec.system, spec.delta, spec.r_min)?)
        } else {
            None
        };
        let polar = if wants(Method::PSomp) {
            Some(build_polar_codebook(&spec.system, spec.delta, spec.r_min)?)
        } else {
            None
        };
        let angular = if wants(Method::AngularSomp) {
            Some(build_angular_codebook(&spec.system)?)
        } else {
            None
        };
        Ok(Codebooks {
            spherical,
            polar,
            angular,
        })
    }

    fn for_method(&self, method: Method) -> Option<&SphericalCodebook> {
        match method {
            Method::SSomp => self.spherical.as_ref(),
            Method::PSomp => self.polar.as_ref(),
            Method::AngularSomp => self.angular.as_ref(),
            Method::Ls | Method::Oracle => None,
        }
    }
}

/// Everything shared by the trials of one sweep value: the combiner and
/// the `A W` products for each selected SOMP variant.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub sweep_value: f64,
    pub snr_db: f64,
    pub system: SystemConfig,
    pub combining: CombiningMatrix,
    dictionaries: Vec<(Method, Dictionary)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: Method,
    /// Linear NMSE, or the error message when the estimator failed.
    pub nmse: Result<f64, String>,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub sweep_value: f64,
    pub trial_index: usize,
    pub outcomes: Vec<MethodOutcome>,
}

impl TrialRecord {
    pub fn nmse(&self, method: Method) -> Option<f64> {
        self.outcomes
            .iter()
            .find(|o| o.method == method)
            .and_then(|o| o.nmse.clone().ok())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub method: Method,
    pub mean_nmse_linear: f64,
    pub mean_nmse_db: f64,
    /// Trials that produced an NMSE for this method.
    pub trial_count: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, sweep_value: f64, method: Method) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.sweep_value == sweep_value && r.method == method)
    }
}

/// A validated RunSpec with its codebooks.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub spec: RunSpec,
    pub codebooks: Codebooks,
}

impl Experiment {
    pub fn new(spec: RunSpec) -> Result<Self> {
        spec.validate()?;
        let codebooks = Codebooks::for_spec(&spec)?;
        Ok(Experiment { spec, codebooks })
    }

    /// Pilot length and SNR at `sweep_value`.
    fn operating_point(&self, sweep_value: f64) -> Result<(usize, f64)> {
        match &self.spec.sweep {
            Sweep::Snr(_) => Ok((self.spec.system.num_pilot_slots, sweep_value)),
            Sweep::Pilot { snr_db, .. } => {
                if !(sweep_value >= 1.0 && sweep_value.fract() == 0.0) {
                    return Err(Error::config(format!(
                        "pilot sweep value must be a positive integer, got {sweep_value}"
                    )));
                }
                Ok((sweep_value as usize, *snr_db))
            }
        }
    }

    /// Builds the combiner (keyed by master seed and pilot length) and
    /// the dictionary products for one sweep value.
    pub fn point(&self, sweep_value: f64) -> Result<SweepPoint> {
        let (pilots, snr_db) = self.operating_point(sweep_value)?;
        let mut system = self.spec.system.clone();
        system.num_pilot_slots = pilots;
        let combining = generate_combining(
            derive_seed(&[self.spec.master_seed, TAG_COMBINING, pilots as u64]),
            pilots,
            system.num_rf_chains,
            system.num_antennas,
        )?;
        let mut dictionaries = Vec::new();
        for &m in &self.spec.methods {
            if let Some(cb) = self.codebooks.for_method(m) {
                dictionaries.push((m, Dictionary::new(&combining, cb)?));
            }
        }
        Ok(SweepPoint {
            sweep_value,
            snr_db,
            system,
            combining,
            dictionaries,
        })
    }

    fn draw_paths(&self, rng: &mut ChaCha8Rng) -> Result<Vec<PathParams>> {
        let count = self.spec.num_paths;
        match self.spec.path_model {
            PathModel::Random => Ok((0..count)
                .map(|_| sample_one(rng, &self.spec.user_ranges))
                .collect()),
            PathModel::PlantedOnGrid => {
                let cb = self
                    .codebooks
                    .spherical
                    .as_ref()
                    .ok_or_else(|| Error::config("planted paths need the spherical codebook"))?;
                let finite: Vec<_> = cb
                    .grid
                    .iter()
                    .filter_map(|p| match p.distance {
                        RingDistance::Finite(r) => Some((r, p.elevation_rad, p.azimuth_rad)),
                        RingDistance::FarField => None,
                    })
                    .collect();
                if finite.len() < count {
                    return Err(Error::config(format!(
                        "codebook has {} finite-distance points, {count} planted paths requested",
                        finite.len()
                    )));
                }
                Ok(index::sample(rng, finite.len(), count)
                    .into_iter()
                    .map(|i| {
                        let (r, theta, phi) = finite[i];
                        PathParams {
                            distance_m: r,
                            elevation_rad: theta,
                            azimuth_rad: phi.rem_euclid(TAU),
                            gain: complex_normal(rng),
                        }
                    })
                    .collect())
            }
        }
    }

    /// One Monte Carlo trial: paths, channel, measurements, then every
    /// selected method on the same data.
    pub fn run_trial(&self, point: &SweepPoint, trial_index: usize) -> Result<TrialRecord> {
        let trial_seed = derive_seed(&[
            self.spec.master_seed,
            point.sweep_value.to_bits(),
            trial_index as u64,
        ]);
        let mut path_rng = ChaCha8Rng::seed_from_u64(derive_seed(&[trial_seed, TAG_PATHS]));
        let paths = self.draw_paths(&mut path_rng)?;
        let h = generate_channel(&paths, &point.system)?;
        let y = synthesize_measurements(
            &h,
            &point.combining,
            point.snr_db,
            derive_seed(&[trial_seed, TAG_NOISE]),
        )?;

        let outcomes = self
            .spec
            .methods
            .iter()
            .map(|&method| {
                let start = Instant::now();
                let estimate = match method {
                    Method::Ls => ls_estimate(&y.observations, &point.combining),
                    Method::Oracle => {
                        oracle_estimate(&y.observations, &point.combining, &paths, &point.system)
                            .map(|o| o.estimate)
                    }
                    somp => {
                        let cb = self.codebooks.for_method(somp);
                        let dict = point.dictionaries.iter().find(|(m, _)| *m == somp);
                        match (cb, dict) {
                            (Some(cb), Some((_, dict))) => {
                                s_somp_with_dictionary(&y.observations, dict, cb, self.spec.l_hat)
                                    .map(|r| r.channel_estimate)
                            }
                            _ => Err(Error::config(format!("no codebook for {somp}"))),
                        }
                    }
                };
                let nmse = estimate
                    .and_then(|est| nmse(&h.entries, &est))
                    .map_err(|e| e.to_string());
                MethodOutcome {
                    method,
                    nmse,
                    elapsed_s: start.elapsed().as_secs_f64(),
                }
            })
            .collect();

        Ok(TrialRecord {
            sweep_value: point.sweep_value,
            trial_index,
            outcomes,
        })
    }

    /// All trials at one sweep value, run on the configured worker pool.
    /// Results come back in trial order whatever the parallelism.
    pub fn run_point(&self, point: &SweepPoint) -> Result<Vec<TrialRecord>> {
        let trials = self.spec.trials;
        let work = || {
            (0..trials)
                .into_par_iter()
                .map(|i| self.run_trial(point, i))
                .collect::<Result<Vec<_>>>()
        };
        if self.spec.workers == 0 {
            work()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.spec.workers)
                .build()
                .map_err(|e| Error::config(format!("worker pool: {e}")))?
                .install(work)
        }
    }

    /// Per-method averages in the configured domain, in method order.
    fn aggregate(&self, sweep_value: f64, records: &[TrialRecord]) -> Vec<SweepRow> {
        self.spec
            .methods
            .iter()
            .map(|&method| {
                let mut sum = 0.0;
                let mut count = 0;
                let mut wall = 0.0;
                for rec in records {
                    for o in rec.outcomes.iter().filter(|o| o.method == method) {
                        wall += o.elapsed_s;
                        match &o.nmse {
                            Ok(v) => {
                                sum += match self.spec.averaging {
                                    Averaging::Linear => *v,
                                    Averaging::Db => 10.0 * v.log10(),
                                };
                                count += 1;
                            }
                            Err(e) => log::warn!(
                                "{method} failed at {sweep_value}, trial {}: {e}",
                                rec.trial_index
                            ),
                        }
                    }
                }
                let mean = if count > 0 { sum / count as f64 } else { f64::NAN };
                let (linear, db) = match self.spec.averaging {
                    Averaging::Linear => (mean, 10.0 * mean.log10()),
                    Averaging::Db => (10f64.powf(mean / 10.0), mean),
                };
                SweepRow {
                    sweep_value,
                    method,
                    mean_nmse_linear: linear,
                    mean_nmse_db: db,
                    trial_count: count,
                    wall_time_s: if self.spec.record_timing { wall } else { 0.0 },
                }
            })
            .collect()
    }

    /// Runs every sweep value in order.
    pub fn sweep(&self) -> Result<SweepResult> {
        let mut rows = Vec::new();
        for value in self.spec.sweep.values() {
            let point = self.point(value)?;
            let records = self.run_point(&point)?;
            rows.extend(self.aggregate(value, &records));
        }
        Ok(SweepResult { rows })
    }
}

/// Single trial, building codebooks and the combiner from scratch.
pub fn run_trial(spec: &RunSpec, sweep_value: f64, trial_index: usize) -> Result<TrialRecord> {
    let exp = Experiment::new(spec.clone())?;
    let point = exp.point(sweep_value)?;
    exp.run_trial(&point, trial_index)
}

pub fn sweep(spec: &RunSpec) -> Result<SweepResult> {
    Experiment::new(spec.clone())?.sweep()
}

pub fn sweep_snr(spec: &RunSpec) -> Result<SweepResult> {
    match spec.sweep {
        Sweep::Snr(_) => sweep(spec),
        Sweep::Pilot { .. } => Err(Error::config("sweep_snr needs an SNR list")),
    }
}

pub fn sweep_pilot(spec: &RunSpec) -> Result<SweepResult> {
    match spec.sweep {
        Sweep::Pilot { .. } => sweep(spec),
        Sweep::Snr(_) => Err(Error::config("sweep_pilot needs a pilot list")),
    }
}
