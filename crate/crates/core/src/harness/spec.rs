use std::fmt;
use std::str::FromStr;

use crate::channel::{SystemConfig, UserRanges};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// S-SOMP over the spherical-domain codebook.
    SSomp,
    /// SOMP over the polar (theta = pi/2) codebook.
    PSomp,
    /// SOMP over the DFT codebook.
    AngularSomp,
    /// Minimum-norm least squares.
    Ls,
    /// Least squares on the true steering vectors.
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::SSomp,
        Method::PSomp,
        Method::AngularSomp,
        Method::Ls,
        Method::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::SSomp => "S_SOMP",
            Method::PSomp => "P_SOMP",
            Method::AngularSomp => "ANGULAR_SOMP",
            Method::Ls => "LS",
            Method::Oracle => "ORACLE",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::config(format!("unknown method {s:?}")))
    }
}

/// Parses a comma-separated method list, keeping canonical order.
pub(crate) fn parse_methods(s: &str) -> Result<Vec<Method>> {
    let mut methods = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(Method::from_str)
        .collect::<Result<Vec<_>>>()?;
    methods.sort();
    methods.dedup();
    Ok(methods)
}

/// How trial channels are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathModel {
    /// Uniform positions inside the user ranges.
    Random,
    /// Paths placed exactly on finite-distance spherical-codebook points.
    PlantedOnGrid,
}

impl FromStr for PathModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "random" => Ok(PathModel::Random),
            "planted" => Ok(PathModel::PlantedOnGrid),
            other => Err(Error::config(format!("unknown path model {other:?}"))),
        }
    }
}

/// Domain in which per-trial NMSE values are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    /// Mean of linear NMSE, also reported in dB.
    Linear,
    /// Mean of per-trial dB values, also reported as a linear ratio.
    Db,
}

impl FromStr for Averaging {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(Averaging::Linear),
            "db" => Ok(Averaging::Db),
            other => Err(Error::config(format!("unknown averaging domain {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    Snr(Vec<f64>),
    Pilot { pilots: Vec<usize>, snr_db: f64 },
}

impl Sweep {
    /// Sweep values as they appear in the output rows.
    pub fn values(&self) -> Vec<f64> {
        match self {
            Sweep::Snr(v) => v.clone(),
            Sweep::Pilot { pilots, .. } => pilots.iter().map(|&p| p as f64).collect(),
        }
    }
}

/// One fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub system: SystemConfig,
    pub delta: f64,
    pub r_min: f64,
    pub num_paths: usize,
    /// SOMP iteration count.
    pub l_hat: usize,
    pub user_ranges: UserRanges,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub master_seed: u64,
    pub sweep: Sweep,
    pub path_model: PathModel,
    pub averaging: Averaging,
    /// Trial worker threads; 0 uses every available core.
    pub workers: usize,
    /// Write measured wall time into the rows; off gives byte-stable CSVs.
    pub record_timing: bool,
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.user_ranges.validate().map_err(|e| Error::config(e.to_string()))?;
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::config("method set is empty"));
        }
        if self.num_paths == 0 || self.num_paths > self.system.num_antennas {
            return Err(Error::config(format!(
                "num_paths must lie in [1, {}], got {}",
                self.system.num_antennas, self.num_paths
            )));
        }
        if self.l_hat == 0 {
            return Err(Error::config("l_hat must be at least 1"));
        }
        let ascending = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        match &self.sweep {
            Sweep::Snr(list) => {
                if list.is_empty() || !ascending(list) || list.iter().any(|s| s.is_nan()) {
                    return Err(Error::config("SNR list must be non-empty and strictly increasing"));
                }
            }
            Sweep::Pilot { pilots, snr_db } => {
                if pilots.is_empty() || pilots.contains(&0) || !pilots.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::config(
                        "pilot list must be non-empty, positive and strictly increasing",
                    ));
                }
                if snr_db.is_nan() {
                    return Err(Error::config("fixed SNR must be a number"));
                }
            }
        }
        Ok(())
    }
}
