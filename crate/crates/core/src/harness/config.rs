//! Layered experiment configuration: built-in profile, then a
//! `key = value` file, then command-line overrides.

use std::f64::consts::PI;
use std::str::FromStr;

use super::spec::{parse_methods, Averaging, Method, PathModel, RunSpec, Sweep};
use crate::channel::{SystemConfig, UserRanges};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// N = 128, runs in minutes on a laptop.
    Desk,
    /// N = 512 operating point; slow.
    Paper,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(Error::config(format!("unknown profile {other:?}"))),
        }
    }
}

/// Every tunable of an experiment before the sweep kind is chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub delta: f64,
    pub r_min: f64,
    pub num_paths: usize,
    /// Defaults to `num_paths` when unset.
    pub l_hat: Option<usize>,
    pub user_ranges: UserRanges,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub master_seed: u64,
    pub snr_list_db: Vec<f64>,
    pub pilot_list: Vec<usize>,
    /// Fixed SNR of the pilot sweep.
    pub snr_db: f64,
    pub path_model: PathModel,
    pub averaging: Averaging,
    pub workers: usize,
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn profile(profile: Profile) -> Self {
        let system = match profile {
            Profile::Desk => SystemConfig {
                carrier_freq_hz: 30e9,
                bandwidth_hz: 100e6,
                num_subcarriers: 16,
                num_antennas: 128,
                antenna_spacing_m: 0.005,
                num_rf_chains: 4,
                num_pilot_slots: 16,
            },
            Profile::Paper => SystemConfig {
                carrier_freq_hz: 30e9,
                bandwidth_hz: 100e6,
                num_subcarriers: 16,
                num_antennas: 512,
                antenna_spacing_m: 0.005,
                num_rf_chains: 4,
                num_pilot_slots: 32,
            },
        };
        ExperimentConfig {
            system,
            delta: 0.55,
            r_min: match profile {
                Profile::Desk => 0.5,
                Profile::Paper => 4.0,
            },
            num_paths: 3,
            l_hat: None,
            user_ranges: UserRanges::paper(),
            methods: Method::ALL.to_vec(),
            trials: 100,
            master_seed: 1,
            snr_list_db: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            pilot_list: vec![8, 16, 32, 64],
            snr_db: 5.0,
            path_model: PathModel::Random,
            averaging: Averaging::Linear,
            workers: 0,
            record_timing: true,
        }
    }

    pub fn snr_spec(&self) -> Result<RunSpec> {
        self.run_spec(Sweep::Snr(self.snr_list_db.clone()))
    }

    pub fn pilot_spec(&self) -> Result<RunSpec> {
        self.run_spec(Sweep::Pilot {
            pilots: self.pilot_list.clone(),
            snr_db: self.snr_db,
        })
    }

    pub fn run_spec(&self, sweep: Sweep) -> Result<RunSpec> {
        let spec = RunSpec {
            system: self.system.clone(),
            delta: self.delta,
            r_min: self.r_min,
            num_paths: self.num_paths,
            l_hat: self.l_hat.unwrap_or(self.num_paths),
            user_ranges: self.user_ranges,
            methods: self.methods.clone(),
            trials: self.trials,
            master_seed: self.master_seed,
            sweep,
            path_model: self.path_model,
            averaging: self.averaging,
            workers: self.workers,
            record_timing: self.record_timing,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: String| Error::config(format!("{key}: {e}"));
        match key {
            "carrier_freq_hz" => self.system.carrier_freq_hz = real(value).map_err(bad)?,
            "bandwidth_hz" => self.system.bandwidth_hz = real(value).map_err(bad)?,
            "num_subcarriers" => self.system.num_subcarriers = count(value).map_err(bad)?,
            "num_antennas" => self.system.num_antennas = count(value).map_err(bad)?,
            "antenna_spacing_m" => self.system.antenna_spacing_m = real(value).map_err(bad)?,
            "num_rf_chains" => self.system.num_rf_chains = count(value).map_err(bad)?,
            "num_pilot_slots" => self.system.num_pilot_slots = count(value).map_err(bad)?,
            "delta" => self.delta = real(value).map_err(bad)?,
            "r_min" => self.r_min = real(value).map_err(bad)?,
            "num_paths" => self.num_paths = count(value).map_err(bad)?,
            "l_hat" => self.l_hat = Some(count(value).map_err(bad)?),
            "r_range" => self.user_ranges.distance_m = pair(value).map_err(bad)?,
            "theta_range" => self.user_ranges.elevation_rad = pair(value).map_err(bad)?,
            "phi_range" => self.user_ranges.azimuth_rad = pair(value).map_err(bad)?,
            "methods" => self.methods = parse_methods(value)?,
            "trials" => self.trials = count(value).map_err(bad)?,
            "master_seed" => {
                self.master_seed = value.trim().parse().map_err(|e| bad(format!("{e}")))?
            }
            "snr_list_db" => self.snr_list_db = list(value, real).map_err(bad)?,
            "pilot_list" => self.pilot_list = list(value, count).map_err(bad)?,
            "snr_db" => self.snr_db = real(value).map_err(bad)?,
            "path_model" => self.path_model = value.parse()?,
            "averaging" => self.averaging = value.parse()?,
            "workers" => self.workers = count(value).map_err(bad)?,
            "record_timing" => {
                self.record_timing = value.trim().parse().map_err(|e| bad(format!("{e}")))?
            }
            _ => return Err(Error::config(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }
}

/// Applies a `key = value` file body. `#` starts a comment.
pub fn apply_config_text(cfg: &mut ExperimentConfig, text: &str) -> Result<()> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("line {}: expected `key = value`, got {raw:?}", lineno + 1))
        })?;
        cfg.set(key.trim(), value.trim())
            .map_err(|e| Error::config(format!("line {}: {e}", lineno + 1)))?;
    }
    Ok(())
}

/// Real number, also accepting multiples of pi such as `-pi/2` or `2*pi`.
fn real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?),
        None => (body, 1.0),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(k) => k
            .trim_end_matches('*')
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("{s:?}: {e}"))?,
        None => return Err(format!("{s:?} is not a number")),
    };
    Ok(sign * factor * PI / den)
}

fn count(s: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|e| format!("{s:?}: {e}"))
}

fn list<T>(s: &str, item: fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(item).collect()
}

fn pair(s: &str) -> Result<(f64, f64), String> {
    match list(s, real)?.as_slice() {
        [lo, hi] => Ok((*lo, *hi)),
        other => Err(format!("expected two values, got {}", other.len())),
    }
}
